#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "defosc/algebra.hpp"
#include "defosc/liouvillian.hpp"

namespace defosc {

/// Birth-death rates of the population ladder,
///   t_+(n) = (n + 1) [2 D_+(Omega(n)) - lambda],  t_-(n) = n [2 D_+(Omega(n-1)) + lambda].
///
/// up[k] = t_+(k) for k = 0..dim-2 and down[k] = t_-(k) for k = 0..dim-1
/// (down[0] = 0). up_gain / down_gain hold the per-step factors
/// 2 D_+ -+ lambda, so that steady_product can use them without the (n + 1)
/// multiplier.
struct RateChain {
  std::size_t dim = 0;
  std::vector<double> up;
  std::vector<double> down;
  std::vector<double> up_gain;
  std::vector<double> down_gain;

  /// Some t_+ is negative (possible for custom baths with 2 D_+ < lambda).
  bool has_negative_rates() const noexcept;

  /// Chain from raw rates: up has dim - 1 entries, down has dim entries with down[0] = 0.
  static RateChain from_rates(std::vector<double> up, std::vector<double> down);
};

/// Requires D_- = D_pq = 0 at every level.
RateChain transition_rates(const Deformation& def, const BathModel& bath, const ModeParams& mode);

struct PopulationVector {
  std::vector<double> p;
  /// Set when some product factor is negative; p is then left unnormalized.
  bool negative_factor = false;

  std::size_t size() const noexcept { return p.size(); }
  double operator[](std::size_t n) const { return p[n]; }
};

/// P(n) = P(0) prod_{k<n} up_gain(k) / down_gain(k), normalized on the basis.
PopulationVector steady_product(const RateChain& chain);

/// Kernel of the birth-death rate matrix by a direct solve with one balance
/// row replaced by the normalization row.
PopulationVector steady_nullspace(const RateChain& chain);

/// max_n |t_-(n) P(n) - t_+(n-1) P(n-1)| over n = 1..dim-1.
double detailed_balance_residual(const RateChain& chain, std::span<const double> p);

/// dP/dt = Q P for the truncated chain (dense, dim x dim).
Eigen::MatrixXd rate_matrix(const RateChain& chain);

struct ThermalDistribution {
  PopulationVector populations;
  double partition = 0.0;   // Z_f summed over the truncated basis
  double tail_bound = 0.0;  // geometric bound on the omitted mass, relative to Z_f
};

/// P(n) = exp(-beta E_n / omega) / Z_f on |0>..|dim-1>. The tail bound
/// assumes non-increasing ratios of successive weights, which holds whenever
/// Omega(n) is nondecreasing.
ThermalDistribution thermal_distribution(const Deformation& def, std::size_t dim, double beta);

}  // namespace defosc
