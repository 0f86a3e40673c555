#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "defosc/algebra.hpp"
#include "defosc/evolve.hpp"
#include "defosc/liouvillian.hpp"
#include "defosc/table.hpp"
#include "defosc/thermo.hpp"

namespace defosc::scenario {

/// Invalid configuration; `field` is the dotted key at fault (may be empty).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(field.empty() ? message : field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

enum class Mode { spectrum, evolve, steady, thermo, sweep };

Mode parse_mode(std::string_view text, const std::string& field = "mode");
std::string_view mode_name(Mode mode);

/// Dotted key -> raw value. Lists are comma separated.
using FlatConfig = std::map<std::string, std::string>;

/// `key = value` lines; '#' starts a comment line; duplicate keys are rejected.
FlatConfig parse_flat(std::string_view text);

/// JSON object whose nested objects mirror the dotted keys. Arrays become
/// comma separated lists, numbers are rendered with 17 significant digits.
FlatConfig parse_json(std::string_view text);

/// JSON when the path ends in .json or the first non-blank byte is '{'.
FlatConfig load_config(const std::filesystem::path& path);

struct SweepSpec {
  Mode base = Mode::thermo;
  std::string parameter;  // tau, beta, lambda or dim
  std::vector<double> values;
};

struct ScenarioConfig {
  Mode mode = Mode::spectrum;
  Deformation deformation = Deformation::identity();
  ModeParams mode_params;
  std::optional<double> beta;  // +inf encodes T = 0
  double lambda = 0.0;
  std::optional<BathModel> bath;
  InitialState initial_state;
  std::optional<double> t_end;
  std::optional<double> dt;  // defaults to the generator's recommended step
  std::size_t sample_every = 1;
  double series_tol = kDefaultSeriesTol;
  std::optional<SweepSpec> sweep;
  std::optional<std::filesystem::path> output_path;
  OutputFormat format = OutputFormat::csv;
};

/// Validates every key and the preconditions of the selected mode.
ScenarioConfig parse_config(const FlatConfig& flat);

/// Copy of `flat` with one sweep parameter set to `value`.
FlatConfig with_sweep_value(const FlatConfig& flat, const std::string& parameter, double value);

}  // namespace defosc::scenario
