#include "defosc/thermo.hpp"

#include <cmath>
#include <limits>

#include "defosc/algebra.hpp"
#include "defosc/errors.hpp"

namespace defosc {
namespace {

void require_series_args(double beta, double tau, double tol) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw DomainError("beta must be finite and positive");
  if (!std::isfinite(tau)) throw DomainError("tau must be finite");
  if (!(tol > 0.0)) throw DomainError("series tolerance must be positive");
}

void require_closed_form_beta(double beta) {
  if (!std::isfinite(beta) || !(beta >= kMinClosedFormBeta)) {
    throw DomainError("closed forms need finite beta >= 1e-6");
  }
}

// exp{-(beta / 2)([n + 1] + [n])} and its scaled energy ([n + 1] + [n]) / 2.
struct BoltzmannTerm {
  double weight;
  double level;
};

BoltzmannTerm boltzmann_term(double beta, double tau, std::size_t n) {
  const auto x = static_cast<double>(n);
  const double level = 0.5 * (q_bracket(x + 1.0, tau) + q_bracket(x, tau));
  return {std::exp(-beta * level), level};
}

double geometric_tail(double last, double previous) {
  if (last == 0.0) return 0.0;
  const double ratio = last / previous;
  if (!(ratio < 1.0)) return std::numeric_limits<double>::infinity();
  return last * ratio / (1.0 - ratio);
}

}  // namespace

SeriesSum partition_q(double beta, double tau, double tol) {
  require_series_args(beta, tau, tol);
  tau = std::abs(tau);
  SeriesSum sum;
  double previous = 0.0;
  for (std::size_t n = 0;; ++n) {
    const double w = boltzmann_term(beta, tau, n).weight;
    sum.value += w;
    sum.terms = n + 1;
    if (n > 0 && (w < tol * sum.value || w == 0.0)) {
      sum.tail_bound = geometric_tail(w, previous);
      return sum;
    }
    previous = w;
  }
}

double undeformed_partition(double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  return 0.5 / std::sinh(0.5 * beta);
}

ThermalMoments thermal_moments(double beta) {
  require_closed_form_beta(beta);
  const double x = std::exp(-beta);
  const double gap = -std::expm1(-beta);  // 1 - x
  ThermalMoments m;
  m.nbar = x / gap;
  m.nbar2 = x * (1.0 + x) / (gap * gap);
  m.nbar3 = x * (1.0 + x * (4.0 + x)) / (gap * gap * gap);
  return m;
}

SmallTauPartition zq_small_tau(double beta, double tau) {
  require_closed_form_beta(beta);
  SmallTauPartition out;
  out.moments = thermal_moments(beta);
  out.z = undeformed_partition(beta);
  const auto& m = out.moments;
  out.b = -(beta * out.z / 12.0) * (2.0 * m.nbar3 + 3.0 * m.nbar2 + m.nbar);
  out.z_plus_b_tau2 = out.z + out.b * tau * tau;
  return out;
}

double energy_tau2_coefficient(double beta) {
  require_closed_form_beta(beta);
  const double x = std::exp(-beta);
  const double gap = -std::expm1(-beta);
  const double gap2 = gap * gap;
  return x / gap2 * ((1.0 + x) / gap - beta * (1.0 + x * (4.0 + x)) / gap2);
}

double equilibrium_energy_closed(double beta, double tau, double omega) {
  require_closed_form_beta(beta);
  const double coth_half = 1.0 / std::tanh(0.5 * beta);
  return 0.5 * omega * (coth_half + tau * tau * energy_tau2_coefficient(beta));
}

double equilibrium_energy_series(double beta, double tau, double omega, double tol) {
  require_series_args(beta, tau, tol);
  tau = std::abs(tau);
  double z = 0.0;
  double weighted = 0.0;
  for (std::size_t n = 0;; ++n) {
    const BoltzmannTerm t = boltzmann_term(beta, tau, n);
    z += t.weight;
    weighted += t.level * t.weight;
    if (n > 0 && t.weight < tol * z && t.level * t.weight < tol * weighted) break;
    if (t.weight == 0.0) break;
  }
  return omega * weighted / z;
}

ThermoResult thermo(double beta, double tau, double omega, double tol) {
  ThermoResult r;
  r.beta = beta;
  r.tau = std::abs(tau);
  const SeriesSum zq = partition_q(beta, tau, tol);
  const SmallTauPartition expansion = zq_small_tau(beta, tau);
  r.z = expansion.z;
  r.z_q = zq.value;
  r.z_q_expansion = expansion.z_plus_b_tau2;
  r.b = expansion.b;
  r.moments = expansion.moments;
  r.e_inf_closed = equilibrium_energy_closed(beta, tau, omega);
  r.e_inf_series = equilibrium_energy_series(beta, tau, omega, tol);
  r.tail_bound = zq.tail_bound;
  return r;
}

}  // namespace defosc
