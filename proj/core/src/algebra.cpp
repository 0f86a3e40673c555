#include "defosc/algebra.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "defosc/errors.hpp"

namespace defosc {

Deformation Deformation::identity() { return {DeformationKind::identity, 0.0, {}}; }

Deformation Deformation::q_deformed(double tau) {
  if (!std::isfinite(tau)) throw DomainError("deformation tau must be finite");
  return {DeformationKind::q_deformed, std::abs(tau), {}};
}

Deformation Deformation::from_q(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) throw DomainError("deformation q must be finite and positive");
  return q_deformed(std::log(q));
}

Deformation Deformation::custom(std::vector<double> table) {
  for (std::size_t k = 0; k < table.size(); ++k) {
    if (!std::isfinite(table[k]) || table[k] < 0.0) {
      throw DomainError("custom deformation entry f(" + std::to_string(k + 1) +
                        ") must be finite and nonnegative");
    }
  }
  return {DeformationKind::custom, 0.0, std::move(table)};
}

std::size_t Deformation::max_level() const noexcept {
  if (kind_ == DeformationKind::custom) return table_.size();
  return std::numeric_limits<std::size_t>::max();
}

double q_bracket(double n, double tau) {
  if (tau == 0.0 || n == 0.0) return n;
  const double x = n * tau;
  if (std::abs(x) <= 30.0) return std::sinh(x) / std::sinh(tau);
  // sinh(x) = e^x / 2 up to a relative e^{-60}; keep the quotient out of overflow range.
  const double sign = x < 0.0 ? -1.0 : 1.0;
  return sign * std::exp(std::abs(x) - std::log(2.0 * std::sinh(tau)));
}

double Deformation::structure(std::size_t n) const {
  if (n == 0) return 0.0;
  switch (kind_) {
    case DeformationKind::identity:
      return static_cast<double>(n);
    case DeformationKind::q_deformed:
      return q_bracket(static_cast<double>(n), tau_);
    case DeformationKind::custom: {
      if (n > table_.size()) {
        throw RangeError("F(" + std::to_string(n) + ") beyond custom table of length " +
                         std::to_string(table_.size()));
      }
      const double f = table_[n - 1];
      return static_cast<double>(n) * f * f;
    }
  }
  return 0.0;
}

double Deformation::factor(std::size_t n) const {
  if (n == 0) throw DomainError("f(0) is not evaluated: F(0) = 0 makes it immaterial");
  switch (kind_) {
    case DeformationKind::identity:
      return 1.0;
    case DeformationKind::custom:
      if (n > table_.size()) {
        throw RangeError("f(" + std::to_string(n) + ") beyond custom table of length " +
                         std::to_string(table_.size()));
      }
      return table_[n - 1];
    case DeformationKind::q_deformed:
      return std::sqrt(structure(n) / static_cast<double>(n));
  }
  return 1.0;
}

void ModeParams::validate() const {
  if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("omega must be finite and positive");
  if (dim < 2) throw DomainError("truncation dimension must be at least 2");
}

double structure_value(const Deformation& def, std::size_t n) { return def.structure(n); }

double deformation_factor(const Deformation& def, std::size_t n) { return def.factor(n); }

double energy_level(const Deformation& def, const ModeParams& mode, std::size_t n) {
  if (n >= mode.dim) {
    throw RangeError("level " + std::to_string(n) + " outside basis of dimension " +
                     std::to_string(mode.dim));
  }
  return 0.5 * mode.omega * (def.structure(n + 1) + def.structure(n));
}

double omega_shift(const Deformation& def, std::size_t n) {
  return 0.5 * (def.structure(n + 2) - def.structure(n));
}

SpectrumTable spectrum(const Deformation& def, const ModeParams& mode) {
  mode.validate();
  SpectrumTable table;
  table.structure.resize(mode.dim + 2);
  for (std::size_t n = 0; n < table.structure.size(); ++n) table.structure[n] = def.structure(n);
  table.energies.resize(mode.dim);
  table.omega_shift.resize(mode.dim);
  for (std::size_t n = 0; n < mode.dim; ++n) {
    table.energies[n] = 0.5 * mode.omega * (table.structure[n + 1] + table.structure[n]);
    table.omega_shift[n] = 0.5 * (table.structure[n + 2] - table.structure[n]);
  }
  table.structure.pop_back();
  return table;
}

LadderMatrices ladder_elements(const Deformation& def, const ModeParams& mode) {
  mode.validate();
  const auto dim = static_cast<Eigen::Index>(mode.dim);
  LadderMatrices ladder{Eigen::MatrixXd::Zero(dim, dim), Eigen::MatrixXd::Zero(dim, dim)};
  for (Eigen::Index n = 1; n < dim; ++n) {
    const double amp = std::sqrt(def.structure(static_cast<std::size_t>(n)));
    ladder.lowering(n - 1, n) = amp;
    ladder.raising(n, n - 1) = amp;
  }
  return ladder;
}

}  // namespace defosc
