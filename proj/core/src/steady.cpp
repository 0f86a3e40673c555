#include "defosc/steady.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/LU>

#include "defosc/errors.hpp"

namespace defosc {

bool RateChain::has_negative_rates() const noexcept {
  return std::any_of(up.begin(), up.end(), [](double r) { return r < 0.0; });
}

RateChain RateChain::from_rates(std::vector<double> up, std::vector<double> down) {
  if (down.size() < 2 || up.size() + 1 != down.size()) {
    throw DimensionMismatchError("rate chain needs dim - 1 up rates and dim down rates, dim >= 2");
  }
  if (down[0] != 0.0) throw DomainError("t_-(0) must vanish");
  for (double r : up) {
    if (!std::isfinite(r)) throw DomainError("rates must be finite");
  }
  for (double r : down) {
    if (!std::isfinite(r)) throw DomainError("rates must be finite");
  }
  RateChain chain;
  chain.dim = down.size();
  chain.up_gain.resize(chain.dim - 1);
  chain.down_gain.resize(chain.dim - 1);
  for (std::size_t k = 0; k + 1 < chain.dim; ++k) {
    const auto mult = static_cast<double>(k + 1);
    chain.up_gain[k] = up[k] / mult;
    chain.down_gain[k] = down[k + 1] / mult;
  }
  chain.up = std::move(up);
  chain.down = std::move(down);
  return chain;
}

RateChain transition_rates(const Deformation& def, const BathModel& bath, const ModeParams& mode) {
  mode.validate();
  if (!bath.decoupled()) {
    throw UnsupportedModelError("population ladder needs D_- = D_pq = 0 (diagonal decoupling)");
  }
  RateChain chain;
  chain.dim = mode.dim;
  chain.up.resize(mode.dim - 1);
  chain.down.assign(mode.dim, 0.0);
  chain.up_gain.resize(mode.dim - 1);
  chain.down_gain.resize(mode.dim - 1);
  for (std::size_t k = 0; k + 1 < mode.dim; ++k) {
    const LevelCoefficients c = bath.at(k, omega_shift(def, k));
    if (c.squeeze() != complex{}) {
      throw UnsupportedModelError("population ladder needs D_- = D_pq = 0 (diagonal decoupling)");
    }
    const auto mult = static_cast<double>(k + 1);
    chain.up_gain[k] = c.up_gain;
    chain.down_gain[k] = c.down_gain;
    chain.up[k] = mult * c.up_gain;
    chain.down[k + 1] = mult * c.down_gain;
  }
  return chain;
}

PopulationVector steady_product(const RateChain& chain) {
  PopulationVector result;
  result.p.assign(chain.dim, 0.0);
  result.p[0] = 1.0;
  for (std::size_t n = 1; n < chain.dim; ++n) {
    const double den = chain.down_gain[n - 1];
    if (den == 0.0) {
      throw DegenerateModelError("zero denominator 2 D_+ + lambda at level " + std::to_string(n - 1));
    }
    const double factor = chain.up_gain[n - 1] / den;
    if (factor < 0.0) result.negative_factor = true;
    result.p[n] = result.p[n - 1] * factor;
  }
  if (result.negative_factor) return result;
  double total = 0.0;
  for (double v : result.p) total += v;
  for (double& v : result.p) v /= total;
  return result;
}

Eigen::MatrixXd rate_matrix(const RateChain& chain) {
  const auto dim = static_cast<Eigen::Index>(chain.dim);
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index n = 0; n < dim; ++n) {
    const auto k = static_cast<std::size_t>(n);
    const double up = n + 1 < dim ? chain.up[k] : 0.0;
    q(n, n) = -(up + chain.down[k]);
    if (n > 0) q(n, n - 1) = chain.up[k - 1];
    if (n + 1 < dim) q(n, n + 1) = chain.down[k + 1];
  }
  return q;
}

PopulationVector steady_nullspace(const RateChain& chain) {
  if (chain.dim < 2) throw DomainError("rate chain dimension must be at least 2");
  const auto dim = static_cast<Eigen::Index>(chain.dim);
  Eigen::MatrixXd system = rate_matrix(chain);
  // Balance rows are equilibrated; row 0 becomes the normalization.
  for (Eigen::Index n = 1; n < dim; ++n) {
    const double scale = system.row(n).cwiseAbs().maxCoeff();
    if (scale > 0.0) system.row(n) /= scale;
  }
  system.row(0).setOnes();
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim);
  rhs(0) = 1.0;

  Eigen::FullPivLU<Eigen::MatrixXd> lu(system);
  lu.setThreshold(1e-13);
  if (lu.rank() < dim) {
    throw DegenerateModelError("rate matrix kernel is not one-dimensional (rank " + std::to_string(lu.rank()) + ")");
  }
  const Eigen::VectorXd solution = lu.solve(rhs);
  PopulationVector result;
  result.p.assign(solution.data(), solution.data() + dim);
  return result;
}

double detailed_balance_residual(const RateChain& chain, std::span<const double> p) {
  if (p.size() != chain.dim) throw DimensionMismatchError("population vector length differs from chain dim");
  double worst = 0.0;
  for (std::size_t n = 1; n < chain.dim; ++n) {
    worst = std::max(worst, std::abs(chain.down[n] * p[n] - chain.up[n - 1] * p[n - 1]));
  }
  return worst;
}

ThermalDistribution thermal_distribution(const Deformation& def, std::size_t dim, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (dim < 2) throw DomainError("truncation dimension must be at least 2");
  if (std::isinf(beta)) {
    ThermalDistribution frozen;
    frozen.populations.p.assign(dim, 0.0);
    frozen.populations.p[0] = 1.0;
    return frozen;
  }
  std::vector<double> scaled(dim);
  for (std::size_t n = 0; n < dim; ++n) scaled[n] = def.structure(n + 1) + def.structure(n);

  ThermalDistribution out;
  auto& p = out.populations.p;
  p.resize(dim);
  double total = 0.0;
  for (std::size_t n = 0; n < dim; ++n) {
    p[n] = std::exp(-0.5 * beta * (scaled[n] - scaled[0]));
    total += p[n];
  }
  double tail = 0.0;
  if (p[dim - 1] > 0.0) {
    const double ratio = p[dim - 1] / p[dim - 2];
    tail = ratio < 1.0 ? p[dim - 1] * ratio / (1.0 - ratio) : std::numeric_limits<double>::infinity();
  }
  out.tail_bound = tail / total;
  out.partition = std::exp(-0.5 * beta * scaled[0]) * total;
  for (double& v : p) v /= total;
  return out;
}

}  // namespace defosc
