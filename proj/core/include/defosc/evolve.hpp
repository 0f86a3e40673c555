#pragma once

#include <cstddef>
#include <filesystem>
#include <vector>

#include "defosc/algebra.hpp"
#include "defosc/density_matrix.hpp"
#include "defosc/liouvillian.hpp"

namespace defosc {

struct Observables {
  double mean_N = 0.0;
  complex mean_a{};
  complex mean_Omega_a{};  // <Omega(N) a>
  double energy = 0.0;
};

/// Tr(rho O) for N, a, Omega(N) a and the Hamiltonian.
Observables expectations(const DensityMatrix& rho, const Deformation& def, const ModeParams& mode);

struct TrajectoryRecord {
  Observables observables;
  double trace_err = 0.0;  // |Tr rho - 1|
  double min_eig = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;  // empty when IntegrateOptions::keep_states is false
  std::vector<TrajectoryRecord> records;
};

struct IntegrateOptions {
  static constexpr double kTraceHardCap = 1e-6;

  /// Integration fails once |Tr rho - 1| exceeds this (capped at kTraceHardCap).
  double trace_tolerance = kTraceHardCap;
  bool keep_states = true;
  /// The eigenvalue check dominates the cost of dense sampling on small bases.
  bool compute_min_eig = true;
};

/// Classical fixed-step RK4 on vec(rho). The trace is never renormalized.
/// Samples are taken at every `sample_every`-th step and at t_end; a final
/// step shorter than dt lands exactly on t_end.
Trajectory integrate(const GeneratorMatrix& gen, const DensityMatrix& rho0, double t_end, double dt,
                     std::size_t sample_every, const IntegrateOptions& options = {});

/// rho_{mn}(t) = exp(-i (E_m - E_n) t) rho_{mn}(0), the lambda = 0 solution.
DensityMatrix free_evolution_exact(const Deformation& def, const ModeParams& mode, const DensityMatrix& rho0,
                                   double t);

/// d<N>/dt for a thermal bath, evaluated termwise on the diagonal of rho.
/// Upward flow out of the top level is dropped, matching the generator.
double mean_quanta_flow(const DensityMatrix& rho, const Deformation& def, const BathModel& bath,
                        const ModeParams& mode);

enum class InitialStateKind { fock, thermal, diagonal, file };

struct InitialState {
  InitialStateKind kind = InitialStateKind::fock;
  std::size_t n = 0;
  double beta = 1.0;
  std::vector<double> weights;
  std::filesystem::path path;

  DensityMatrix build(const Deformation& def, std::size_t dim) const;
};

}  // namespace defosc
