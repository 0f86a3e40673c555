#pragma once

#include <cstddef>

namespace defosc {

inline constexpr double kDefaultSeriesTol = 1e-15;

/// Closed-form results below this beta are refused: every expression carries
/// powers of 1 / (e^beta - 1).
inline constexpr double kMinClosedFormBeta = 1e-6;

struct SeriesSum {
  double value = 0.0;
  double tail_bound = 0.0;  // absolute bound on the omitted terms
  std::size_t terms = 0;
};

/// Z_q = sum_n exp{-(beta / 2) ([n + 1] + [n])}, summed until a term drops
/// below tol * partial sum. Terms decrease strictly for beta > 0, tau >= 0,
/// and their ratios do not increase, so the last ratio gives a geometric tail bound.
SeriesSum partition_q(double beta, double tau, double tol = kDefaultSeriesTol);

/// Z = 1 / (2 sinh(beta / 2)).
double undeformed_partition(double beta);

struct ThermalMoments {
  double nbar = 0.0;   // <n>
  double nbar2 = 0.0;  // <n^2>
  double nbar3 = 0.0;  // <n^3>
};

/// Moments of the undeformed Bose distribution, evaluated in x = e^{-beta}.
ThermalMoments thermal_moments(double beta);

struct SmallTauPartition {
  double z = 0.0;
  double b = 0.0;
  double z_plus_b_tau2 = 0.0;
  ThermalMoments moments;
};

/// Z_q ~ Z + b tau^2 with b = -(beta Z / 12)(2 <n^3> + 3 <n^2> + <n>).
SmallTauPartition zq_small_tau(double beta, double tau);

/// c(beta) in E(inf) = (omega / 2)[coth(beta / 2) + tau^2 c].
double energy_tau2_coefficient(double beta);

double equilibrium_energy_closed(double beta, double tau, double omega);

/// Exact mean energy sum_n E_n w_n / Z_q of the (untruncated up to tol) q-deformed Boltzmann state.
double equilibrium_energy_series(double beta, double tau, double omega, double tol = kDefaultSeriesTol);

struct ThermoResult {
  double beta = 0.0;
  double tau = 0.0;
  double z = 0.0;
  double z_q = 0.0;
  double z_q_expansion = 0.0;
  double b = 0.0;
  ThermalMoments moments;
  double e_inf_closed = 0.0;
  double e_inf_series = 0.0;
  double tail_bound = 0.0;  // absolute, from partition_q
};

ThermoResult thermo(double beta, double tau, double omega = 1.0, double tol = kDefaultSeriesTol);

}  // namespace defosc
