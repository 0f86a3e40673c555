#include "defosc/evolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "defosc/errors.hpp"

namespace defosc {
namespace {

using RowMajorMatrix = Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Per-level factors shared by every observable evaluation on one basis.
struct ObservableTables {
  std::vector<double> energy;       // E_n, n < dim
  std::vector<double> sqrt_up;      // sqrt(n + 1), n < dim - 1
  std::vector<double> omega_shift;  // Omega(n), n < dim - 1

  ObservableTables(const Deformation& def, const ModeParams& mode) {
    const std::size_t dim = mode.dim;
    std::vector<double> structure(dim + 1);
    for (std::size_t k = 0; k <= dim; ++k) structure[k] = def.structure(k);
    energy.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) energy[k] = 0.5 * mode.omega * (structure[k] + structure[k + 1]);
    sqrt_up.resize(dim - 1);
    omega_shift.resize(dim - 1);
    for (std::size_t k = 0; k + 1 < dim; ++k) {
      sqrt_up[k] = std::sqrt(static_cast<double>(k + 1));
      omega_shift[k] = 0.5 * (structure[k + 2] - structure[k]);
    }
  }

  // `at(m, n)` returns rho_{mn}.
  template <typename Accessor>
  Observables evaluate(std::size_t dim, Accessor&& at) const {
    Observables obs;
    for (std::size_t k = 0; k < dim; ++k) {
      const double p = at(k, k).real();
      obs.mean_N += static_cast<double>(k) * p;
      obs.energy += energy[k] * p;
    }
    for (std::size_t k = 0; k + 1 < dim; ++k) {
      const complex term = sqrt_up[k] * at(k + 1, k);
      obs.mean_a += term;
      obs.mean_Omega_a += omega_shift[k] * term;
    }
    return obs;
  }
};

double min_eigenvalue_of(const RowMajorMatrix& rho) {
  const Eigen::MatrixXcd herm = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace

Observables expectations(const DensityMatrix& rho, const Deformation& def, const ModeParams& mode) {
  if (rho.dim() != mode.dim) throw DimensionMismatchError("density matrix and mode dimensions differ");
  const ObservableTables tables(def, mode);
  return tables.evaluate(mode.dim, [&](std::size_t m, std::size_t n) { return rho(m, n); });
}

Trajectory integrate(const GeneratorMatrix& gen, const DensityMatrix& rho0, double t_end, double dt,
                     std::size_t sample_every, const IntegrateOptions& options) {
  const std::size_t dim = gen.dim();
  if (rho0.dim() != dim) throw DimensionMismatchError("initial state and generator dimensions differ");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("dt must be finite and positive");
  if (!(t_end >= 0.0) || !std::isfinite(t_end)) throw DomainError("t_end must be finite and nonnegative");
  if (sample_every == 0) throw DomainError("sample_every must be at least 1");
  if (dt > gen.max_stable_step() && t_end > 0.0) {
    throw DomainError("dt = " + std::to_string(dt) + " exceeds the RK4 stability bound " +
                      std::to_string(gen.max_stable_step()) + " of this generator");
  }
  const double trace_cap = std::min(options.trace_tolerance, IntegrateOptions::kTraceHardCap);

  const ObservableTables tables(gen.deformation(), gen.mode());
  const std::size_t size = dim * dim;
  RowMajorMatrix state = rho0.matrix();
  RowMajorMatrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), stage(dim, dim);
  auto span_of = [size](RowMajorMatrix& m) { return std::span<complex>(m.data(), size); };
  auto cspan_of = [size](const RowMajorMatrix& m) { return std::span<const complex>(m.data(), size); };

  Trajectory traj;
  auto record = [&](double t) {
    TrajectoryRecord rec;
    rec.observables = tables.evaluate(dim, [&](std::size_t m, std::size_t n) {
      return state(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    });
    rec.trace_err = std::abs(state.trace() - 1.0);
    rec.min_eig = options.compute_min_eig ? min_eigenvalue_of(state) : 0.0;
    traj.times.push_back(t);
    traj.records.push_back(rec);
    if (options.keep_states) traj.states.push_back(DensityMatrix::unchecked(state));
  };

  record(0.0);
  if (t_end == 0.0) return traj;

  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  for (std::size_t step = 1; step <= steps; ++step) {
    const bool last = step == steps;
    const double h = last ? t_end - static_cast<double>(steps - 1) * dt : dt;

    gen.apply(cspan_of(state), span_of(k1));
    stage = state + (0.5 * h) * k1;
    gen.apply(cspan_of(stage), span_of(k2));
    stage = state + (0.5 * h) * k2;
    gen.apply(cspan_of(stage), span_of(k3));
    stage = state + h * k3;
    gen.apply(cspan_of(stage), span_of(k4));
    state += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    if (!state.allFinite()) throw IntegrationError("non-finite density matrix entry", step);
    const double trace_err = std::abs(state.trace() - 1.0);
    if (trace_err > trace_cap) {
      throw IntegrationError("trace drift " + std::to_string(trace_err) + " exceeds tolerance", step);
    }
    if (last || step % sample_every == 0) record(last ? t_end : static_cast<double>(step) * dt);
  }
  return traj;
}

DensityMatrix free_evolution_exact(const Deformation& def, const ModeParams& mode, const DensityMatrix& rho0,
                                   double t) {
  if (rho0.dim() != mode.dim) throw DimensionMismatchError("density matrix and mode dimensions differ");
  const auto dim = static_cast<Eigen::Index>(mode.dim);
  std::vector<double> energy(mode.dim);
  for (std::size_t k = 0; k < mode.dim; ++k) energy[k] = energy_level(def, mode, k);
  Eigen::MatrixXcd out = rho0.matrix();
  for (Eigen::Index m = 0; m < dim; ++m) {
    for (Eigen::Index n = 0; n < dim; ++n) {
      if (m == n) continue;
      const double gap = energy[static_cast<std::size_t>(m)] - energy[static_cast<std::size_t>(n)];
      out(m, n) *= std::polar(1.0, -gap * t);
    }
  }
  return DensityMatrix::unchecked(std::move(out));
}

double mean_quanta_flow(const DensityMatrix& rho, const Deformation& def, const BathModel& bath,
                        const ModeParams& mode) {
  if (bath.kind() != BathKind::thermal) throw UnsupportedModelError("mean_quanta_flow needs a thermal bath");
  if (rho.dim() != mode.dim) throw DimensionMismatchError("density matrix and mode dimensions differ");
  const double lambda = bath.lambda();
  if (std::isinf(bath.beta())) return -2.0 * lambda * expectations(rho, def, mode).mean_N;

  // lambda (coth(x) - 1) and lambda (coth(x) + 1) are the ladder gains up_gain / down_gain.
  double flow = 0.0;
  LevelCoefficients below{};
  for (std::size_t n = 0; n < mode.dim; ++n) {
    const LevelCoefficients here = bath.at(n, omega_shift(def, n));
    const double p = rho(n, n).real();
    double rate = n + 1 < mode.dim ? here.up_gain * static_cast<double>(n + 1) : 0.0;
    if (n > 0) rate -= below.down_gain * static_cast<double>(n);
    flow += rate * p;
    below = here;
  }
  return flow;
}

DensityMatrix InitialState::build(const Deformation& def, std::size_t dim) const {
  switch (kind) {
    case InitialStateKind::fock:
      return DensityMatrix::fock(dim, n);
    case InitialStateKind::thermal:
      return DensityMatrix::thermal(def, dim, beta);
    case InitialStateKind::diagonal:
      if (weights.size() != dim) {
        throw DimensionMismatchError("initial weights have length " + std::to_string(weights.size()) +
                                     ", basis dimension is " + std::to_string(dim));
      }
      return DensityMatrix::diagonal(weights);
    case InitialStateKind::file: {
      DensityMatrix rho = DensityMatrix::from_file(path);
      if (rho.dim() != dim) throw DimensionMismatchError("initial state file dimension differs from dim");
      return rho;
    }
  }
  return DensityMatrix::fock(dim, 0);
}

}  // namespace defosc
