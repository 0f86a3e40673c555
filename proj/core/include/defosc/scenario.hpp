#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "defosc/config.hpp"
#include "defosc/table.hpp"

namespace defosc::scenario {

/// Numerical result rejected after computation (e.g. a series tail too large).
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct ScenarioOutput {
  Table table;
  std::vector<std::string> warnings;
};

/// Runs spectrum, evolve, steady or thermo.
///   spectrum: n, F, f, E, Omega        (f is nan at n = 0)
///   evolve:   t, mean_N, mean_a_re, mean_a_im, mean_Omega_a_re, mean_Omega_a_im, energy, trace_err, min_eig
///   steady:   n, P_product, P_nullspace, balance_residual
///   thermo:   beta, tau, Z_q, Z_plus_b_tau2, b, E_closed, E_series, tail_bound
ScenarioOutput run_scenario(const ScenarioConfig& config);

struct SweepOutput {
  Table table;
  std::vector<std::string> warnings;
  /// Set when a value failed; rows of earlier values are kept.
  std::optional<std::string> partial;
  int exit_code = kExitOk;
};

/// Runs the base mode for each value on up to `jobs` threads. Rows are
/// concatenated in input order behind a "sweep_<parameter>" column, so the
/// output does not depend on `jobs`.
SweepOutput run_sweep(const FlatConfig& flat, const SweepSpec& sweep, unsigned jobs);

/// Maps an exception to exit code 2 (configuration / model) or 3 (numerical).
int exit_code_for(const std::exception& error);

struct CliRequest {
  std::string mode;
  std::filesystem::path config;
  std::optional<std::filesystem::path> out;
  std::optional<OutputFormat> format;
  unsigned jobs = 1;
};

/// Whole CLI flow. Data goes to the output path (or `out`), machine-readable
/// error and warning records (one JSON object per line) go to `err`.
int run_cli(const CliRequest& request, std::ostream& out, std::ostream& err);

}  // namespace defosc::scenario
