#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "defosc/algebra.hpp"
#include "defosc/density_matrix.hpp"

namespace defosc {

enum class BathKind { thermal, squeezed, custom };

/// Environment coefficients at one level k, i.e. evaluated at Omega(k).
///
/// `up_gain` = 2 D_+ - lambda and `down_gain` = 2 D_+ + lambda are the rate
/// factors of the population ladder; for thermal baths they are computed
/// without cancellation (2 lambda / expm1(beta Omega)).
struct LevelCoefficients {
  double d_plus = 0.0;
  double d_minus = 0.0;
  double d_pq = 0.0;
  double up_gain = 0.0;
  double down_gain = 0.0;

  /// D_- + i D_pq, the coefficient multiplying the two-quantum couplings.
  complex squeeze() const { return {d_minus, d_pq}; }
};

/// Environment coefficient model. Rates share the time unit of omega.
class BathModel {
 public:
  /// beta = hbar omega / kT; +infinity encodes T = 0.
  static BathModel thermal(double lambda, double beta);
  /// Level-independent squeezed-bath coefficients; lambda = gamma.
  static BathModel squeezed(double gamma, double nbar_bath, complex m_squeeze);
  /// Per-level tables indexed by k (coefficient at Omega(k)). Empty d_minus or
  /// d_pq tables mean identically zero.
  static BathModel custom(double lambda, std::vector<double> d_plus, std::vector<double> d_minus = {},
                          std::vector<double> d_pq = {});

  BathKind kind() const noexcept { return kind_; }
  double lambda() const noexcept { return lambda_; }
  double beta() const noexcept { return beta_; }
  double gamma() const noexcept { return lambda_; }
  double nbar_bath() const noexcept { return nbar_bath_; }
  complex m_squeeze() const noexcept { return m_squeeze_; }
  std::span<const double> d_plus_table() const noexcept { return d_plus_; }
  std::span<const double> d_minus_table() const noexcept { return d_minus_; }
  std::span<const double> d_pq_table() const noexcept { return d_pq_; }

  /// True when D_- and D_pq vanish at every level, so populations decouple.
  bool decoupled() const noexcept;

  /// Number of levels with coefficients (unbounded for thermal and squeezed).
  std::size_t levels() const noexcept;

  /// `omega_shift` is Omega(level); only the thermal kind depends on it.
  LevelCoefficients at(std::size_t level, double omega_shift) const;

  /// Same model with a different dissipation rate (gamma for squeezed baths).
  BathModel with_lambda(double lambda) const;
  BathModel with_beta(double beta) const;

 private:
  BathModel() = default;

  BathKind kind_ = BathKind::thermal;
  double lambda_ = 0.0;
  double beta_ = 0.0;
  double nbar_bath_ = 0.0;
  complex m_squeeze_{};
  std::vector<double> d_plus_;
  std::vector<double> d_minus_;
  std::vector<double> d_pq_;
};

/// D_+, D_- and D_pq of a thermal bath at level n. D_- = D_pq = 0.
LevelCoefficients thermal_coefficients(const Deformation& def, const BathModel& bath, std::size_t n);

BathModel squeezed_preset(double gamma, double nbar_bath, complex m_squeeze);

struct DiffusionCoefficients {
  double d_pp = 0.0;
  double d_qq = 0.0;
  double d_pq = 0.0;
};

/// Inverts D_+- = (m omega D_qq +- D_pp / (m omega)) / 2 with m = hbar = 1.
DiffusionCoefficients diffusion_from_combinations(double d_plus, double d_minus, double d_pq, double omega);

/// D_pp > 0, D_qq > 0 and D_pp D_qq - D_pq^2 >= lambda^2 / 4 (hbar = 1). The
/// product comparison allows a relative 1e-14 so that the T = 0 thermal
/// coefficients, which saturate the bound, are not rejected by rounding.
bool positivity_check(double d_pp, double d_qq, double d_pq, double lambda);

enum class GeneratorStorage { sparse, matrix_free };

using SparseGenerator = Eigen::SparseMatrix<complex, Eigen::RowMajor>;

/// Linear map rho -> d rho / dt on vec(rho), with vec index m * dim + n.
///
/// Realizes the number-representation master equation. Couplings whose source
/// element lies outside the basis are dropped; at the top level the upward
/// part of the loss rate is dropped as well, which keeps the truncated flow
/// exactly trace preserving.
class GeneratorMatrix {
 public:
  GeneratorMatrix(const Deformation& def, const BathModel& bath, const ModeParams& mode,
                  GeneratorStorage storage = GeneratorStorage::sparse);

  std::size_t dim() const noexcept { return mode_.dim; }
  GeneratorStorage storage() const noexcept { return storage_; }
  const Deformation& deformation() const noexcept { return def_; }
  const BathModel& bath() const noexcept { return bath_; }
  const ModeParams& mode() const noexcept { return mode_; }

  /// Level energies E_0..E_{dim-1} used by the Hamiltonian term.
  std::span<const double> energies() const noexcept { return energy_; }
  /// Coefficients at levels 0..dim-2 (the only ones the truncated map uses).
  std::span<const LevelCoefficients> coefficients() const noexcept { return level_; }

  /// Explicit sparse matrix (built on demand when storage is matrix_free).
  SparseGenerator materialize() const;

  /// Gershgorin bound on the spectral radius: max row sum of |coefficients|.
  double spectral_scale() const noexcept { return spectral_scale_; }
  /// 0.1 / spectral_scale.
  double recommended_step() const noexcept;
  /// 2.5 / spectral_scale; RK4 is unstable for larger steps.
  double max_stable_step() const noexcept;

  /// out = L(in) on vectorized states; `out` must not alias `in`.
  void apply(std::span<const complex> in, std::span<complex> out) const;

  /// Visits every nonzero coupling of target element (m, n):
  /// visit(source_m, source_n, coefficient).
  template <typename Visitor>
  void for_each_coupling(std::size_t m, std::size_t n, Visitor&& visit) const;

 private:
  Deformation def_;
  BathModel bath_;
  ModeParams mode_;
  GeneratorStorage storage_;

  std::vector<double> energy_;
  std::vector<LevelCoefficients> level_;
  std::vector<double> half_loss_;  // half the total outflow rate of level k
  std::vector<double> sqrt_;       // sqrt(k), k = 0..dim
  bool decoupled_ = true;
  double spectral_scale_ = 0.0;
  SparseGenerator sparse_;
};

Eigen::MatrixXcd apply_generator(const GeneratorMatrix& gen, const Eigen::MatrixXcd& rho);
Eigen::MatrixXcd apply_generator(const GeneratorMatrix& gen, const DensityMatrix& rho);

template <typename Visitor>
void GeneratorMatrix::for_each_coupling(std::size_t m, std::size_t n, Visitor&& visit) const {
  const std::size_t top = mode_.dim - 1;
  const double loss = half_loss_[m] + half_loss_[n];
  visit(m, n, complex(-loss, -(energy_[m] - energy_[n])));

  if (m < top && n < top) {
    const double rate = 0.5 * (level_[m].down_gain + level_[n].down_gain);
    visit(m + 1, n + 1, complex(sqrt_[m + 1] * sqrt_[n + 1] * rate, 0.0));
  }
  if (m > 0 && n > 0) {
    const double rate = 0.5 * (level_[m - 1].up_gain + level_[n - 1].up_gain);
    visit(m - 1, n - 1, complex(sqrt_[m] * sqrt_[n] * rate, 0.0));
  }

  if (decoupled_) return;

  if (m < top && n > 0) {
    const complex z = std::conj(level_[m].squeeze()) + std::conj(level_[n - 1].squeeze());
    visit(m + 1, n - 1, -sqrt_[m + 1] * sqrt_[n] * z);
  }
  if (m > 0 && n < top) {
    const complex z = level_[m - 1].squeeze() + level_[n].squeeze();
    visit(m - 1, n + 1, -sqrt_[m] * sqrt_[n + 1] * z);
  }
  if (m + 2 <= top) {
    visit(m + 2, n, sqrt_[m + 1] * sqrt_[m + 2] * std::conj(level_[m + 1].squeeze()));
  }
  if (n + 2 <= top) {
    visit(m, n + 2, sqrt_[n + 1] * sqrt_[n + 2] * level_[n + 1].squeeze());
  }
  if (m >= 2) {
    visit(m - 2, n, sqrt_[m] * sqrt_[m - 1] * level_[m - 2].squeeze());
  }
  if (n >= 2) {
    visit(m, n - 2, sqrt_[n] * sqrt_[n - 1] * std::conj(level_[n - 2].squeeze()));
  }
}

}  // namespace defosc
