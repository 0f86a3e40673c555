#include "defosc/liouvillian.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "defosc/errors.hpp"

namespace defosc {
namespace {

void require_rate(double value, const char* name) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError(std::string(name) + " must be finite and nonnegative");
  }
}

void require_finite_table(const std::vector<double>& table, const char* name) {
  for (double v : table) {
    if (!std::isfinite(v)) throw DomainError(std::string(name) + " table has non-finite entries");
  }
}

using RowMajorMatrix = Eigen::Matrix<complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

BathModel BathModel::thermal(double lambda, double beta) {
  require_rate(lambda, "lambda");
  if (!(beta > 0.0)) throw DomainError("beta must be positive (use +inf for T = 0)");
  BathModel bath;
  bath.kind_ = BathKind::thermal;
  bath.lambda_ = lambda;
  bath.beta_ = beta;
  return bath;
}

BathModel BathModel::squeezed(double gamma, double nbar_bath, complex m_squeeze) {
  require_rate(gamma, "gamma");
  require_rate(nbar_bath, "nbar_bath");
  if (!std::isfinite(m_squeeze.real()) || !std::isfinite(m_squeeze.imag())) {
    throw DomainError("squeezing parameter M must be finite");
  }
  BathModel bath;
  bath.kind_ = BathKind::squeezed;
  bath.lambda_ = gamma;
  bath.nbar_bath_ = nbar_bath;
  bath.m_squeeze_ = m_squeeze;
  return bath;
}

BathModel BathModel::custom(double lambda, std::vector<double> d_plus, std::vector<double> d_minus,
                            std::vector<double> d_pq) {
  require_rate(lambda, "lambda");
  require_finite_table(d_plus, "D_plus");
  require_finite_table(d_minus, "D_minus");
  require_finite_table(d_pq, "D_pq");
  if (!d_minus.empty() && d_minus.size() != d_plus.size()) {
    throw DomainError("D_minus table length differs from D_plus");
  }
  if (!d_pq.empty() && d_pq.size() != d_plus.size()) throw DomainError("D_pq table length differs from D_plus");
  BathModel bath;
  bath.kind_ = BathKind::custom;
  bath.lambda_ = lambda;
  bath.d_plus_ = std::move(d_plus);
  bath.d_minus_ = std::move(d_minus);
  bath.d_pq_ = std::move(d_pq);
  return bath;
}

bool BathModel::decoupled() const noexcept {
  switch (kind_) {
    case BathKind::thermal:
      return true;
    case BathKind::squeezed:
      return m_squeeze_ == complex{};
    case BathKind::custom:
      for (double v : d_minus_) {
        if (v != 0.0) return false;
      }
      for (double v : d_pq_) {
        if (v != 0.0) return false;
      }
      return true;
  }
  return true;
}

std::size_t BathModel::levels() const noexcept {
  if (kind_ == BathKind::custom) return d_plus_.size();
  return std::numeric_limits<std::size_t>::max();
}

LevelCoefficients BathModel::at(std::size_t level, double omega_shift) const {
  LevelCoefficients c;
  switch (kind_) {
    case BathKind::thermal: {
      if (std::isinf(beta_)) {
        c.d_plus = 0.5 * lambda_;
        c.up_gain = 0.0;
        c.down_gain = 2.0 * lambda_;
        return c;
      }
      const double x = beta_ * omega_shift;
      if (!(x > 0.0)) throw DomainError("thermal coefficients need beta * Omega(n) > 0");
      // 2 D_+ - lambda = lambda (coth(x / 2) - 1) = 2 lambda / (e^x - 1)
      c.up_gain = 2.0 * lambda_ / std::expm1(x);
      c.down_gain = 2.0 * lambda_ + c.up_gain;
      c.d_plus = 0.5 * (lambda_ + c.up_gain);
      return c;
    }
    case BathKind::squeezed:
      c.d_plus = lambda_ * (nbar_bath_ + 0.5);
      c.d_minus = -lambda_ * m_squeeze_.real();
      c.d_pq = -lambda_ * m_squeeze_.imag();
      c.up_gain = 2.0 * lambda_ * nbar_bath_;
      c.down_gain = 2.0 * lambda_ * (nbar_bath_ + 1.0);
      return c;
    case BathKind::custom:
      if (level >= d_plus_.size()) {
        throw RangeError("bath table has no entry for level " + std::to_string(level));
      }
      c.d_plus = d_plus_[level];
      c.d_minus = d_minus_.empty() ? 0.0 : d_minus_[level];
      c.d_pq = d_pq_.empty() ? 0.0 : d_pq_[level];
      c.up_gain = 2.0 * c.d_plus - lambda_;
      c.down_gain = 2.0 * c.d_plus + lambda_;
      return c;
  }
  return c;
}

BathModel BathModel::with_lambda(double lambda) const {
  require_rate(lambda, "lambda");
  BathModel copy = *this;
  copy.lambda_ = lambda;
  return copy;
}

BathModel BathModel::with_beta(double beta) const {
  if (kind_ != BathKind::thermal) throw UnsupportedModelError("beta applies to thermal baths only");
  return thermal(lambda_, beta);
}

LevelCoefficients thermal_coefficients(const Deformation& def, const BathModel& bath, std::size_t n) {
  if (bath.kind() != BathKind::thermal) throw UnsupportedModelError("thermal_coefficients needs a thermal bath");
  return bath.at(n, omega_shift(def, n));
}

BathModel squeezed_preset(double gamma, double nbar_bath, complex m_squeeze) {
  return BathModel::squeezed(gamma, nbar_bath, m_squeeze);
}

DiffusionCoefficients diffusion_from_combinations(double d_plus, double d_minus, double d_pq, double omega) {
  return {omega * (d_plus - d_minus), (d_plus + d_minus) / omega, d_pq};
}

bool positivity_check(double d_pp, double d_qq, double d_pq, double lambda) {
  if (!(d_pp > 0.0) || !(d_qq > 0.0)) return false;
  const double bound = 0.25 * lambda * lambda;
  return d_pp * d_qq - d_pq * d_pq >= bound * (1.0 - 1e-14);
}

GeneratorMatrix::GeneratorMatrix(const Deformation& def, const BathModel& bath, const ModeParams& mode,
                                 GeneratorStorage storage)
    : def_(def), bath_(bath), mode_(mode), storage_(storage) {
  mode_.validate();
  const std::size_t dim = mode_.dim;
  if (bath_.levels() < dim - 1) {
    throw RangeError("bath tables cover " + std::to_string(bath_.levels()) + " levels, generator needs " +
                     std::to_string(dim - 1));
  }

  std::vector<double> structure(dim + 1);
  for (std::size_t k = 0; k <= dim; ++k) structure[k] = def_.structure(k);

  energy_.resize(dim);
  for (std::size_t k = 0; k < dim; ++k) energy_[k] = 0.5 * mode_.omega * (structure[k] + structure[k + 1]);

  level_.resize(dim - 1);
  for (std::size_t k = 0; k + 1 < dim; ++k) {
    const double shift = 0.5 * (structure[k + 2] - structure[k]);
    level_[k] = bath_.at(k, shift);
    if (level_[k].squeeze() != complex{}) decoupled_ = false;
  }

  const std::size_t top = dim - 1;
  half_loss_.assign(dim, 0.0);
  for (std::size_t k = 0; k < dim; ++k) {
    double outflow = 0.0;
    if (k > 0) outflow += static_cast<double>(k) * level_[k - 1].down_gain;
    if (k < top) outflow += static_cast<double>(k + 1) * level_[k].up_gain;
    half_loss_[k] = 0.5 * outflow;
  }

  sqrt_.resize(dim + 1);
  for (std::size_t k = 0; k <= dim; ++k) sqrt_[k] = std::sqrt(static_cast<double>(k));

  for (std::size_t m = 0; m < dim; ++m) {
    for (std::size_t n = 0; n < dim; ++n) {
      double row = 0.0;
      for_each_coupling(m, n, [&](std::size_t, std::size_t, complex c) { row += std::abs(c); });
      spectral_scale_ = std::max(spectral_scale_, row);
    }
  }

  if (storage_ == GeneratorStorage::sparse) sparse_ = materialize();
}

SparseGenerator GeneratorMatrix::materialize() const {
  const std::size_t dim = mode_.dim;
  const auto size = static_cast<Eigen::Index>(dim * dim);
  std::vector<Eigen::Triplet<complex>> triplets;
  triplets.reserve(dim * dim * (decoupled_ ? 3 : 9));
  for (std::size_t m = 0; m < dim; ++m) {
    for (std::size_t n = 0; n < dim; ++n) {
      const auto row = static_cast<Eigen::Index>(m * dim + n);
      for_each_coupling(m, n, [&](std::size_t sm, std::size_t sn, complex c) {
        if (c != complex{}) triplets.emplace_back(row, static_cast<Eigen::Index>(sm * dim + sn), c);
      });
    }
  }
  SparseGenerator matrix(size, size);
  matrix.setFromTriplets(triplets.begin(), triplets.end());
  matrix.makeCompressed();
  return matrix;
}

double GeneratorMatrix::recommended_step() const noexcept {
  return spectral_scale_ > 0.0 ? 0.1 / spectral_scale_ : std::numeric_limits<double>::infinity();
}

double GeneratorMatrix::max_stable_step() const noexcept {
  return spectral_scale_ > 0.0 ? 2.5 / spectral_scale_ : std::numeric_limits<double>::infinity();
}

void GeneratorMatrix::apply(std::span<const complex> in, std::span<complex> out) const {
  const std::size_t dim = mode_.dim;
  if (in.size() != dim * dim || out.size() != dim * dim) {
    throw DimensionMismatchError("state size " + std::to_string(in.size()) + " does not match generator dim " +
                                 std::to_string(dim));
  }
  if (storage_ == GeneratorStorage::sparse) {
    const auto size = static_cast<Eigen::Index>(in.size());
    Eigen::Map<const Eigen::VectorXcd> x(in.data(), size);
    Eigen::Map<Eigen::VectorXcd> y(out.data(), size);
    y.noalias() = sparse_ * x;
    return;
  }
  for (std::size_t m = 0; m < dim; ++m) {
    for (std::size_t n = 0; n < dim; ++n) {
      complex acc{};
      for_each_coupling(m, n, [&](std::size_t sm, std::size_t sn, complex c) { acc += c * in[sm * dim + sn]; });
      out[m * dim + n] = acc;
    }
  }
}

Eigen::MatrixXcd apply_generator(const GeneratorMatrix& gen, const Eigen::MatrixXcd& rho) {
  const auto dim = static_cast<Eigen::Index>(gen.dim());
  if (rho.rows() != dim || rho.cols() != dim) {
    throw DimensionMismatchError("density matrix is " + std::to_string(rho.rows()) + "x" +
                                 std::to_string(rho.cols()) + ", generator dim is " + std::to_string(dim));
  }
  const RowMajorMatrix in = rho;
  RowMajorMatrix out(dim, dim);
  gen.apply({in.data(), static_cast<std::size_t>(in.size())}, {out.data(), static_cast<std::size_t>(out.size())});
  return out;
}

Eigen::MatrixXcd apply_generator(const GeneratorMatrix& gen, const DensityMatrix& rho) {
  return apply_generator(gen, rho.matrix());
}

}  // namespace defosc
