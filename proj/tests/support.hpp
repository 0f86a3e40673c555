#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testing_support {

using complex = std::complex<double>;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;

inline MatrixXcd random_complex(std::size_t dim, std::mt19937& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXcd b(dim, dim);
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) b(i, j) = complex(g(rng), g(rng));
  }
  return b;
}

// Hermitian with unit trace; not necessarily positive.
inline MatrixXcd random_hermitian_unit_trace(std::size_t dim, std::mt19937& rng) {
  const MatrixXcd b = random_complex(dim, rng);
  MatrixXcd h = 0.5 * (b + b.adjoint());
  const complex shift = (1.0 - h.trace()) / static_cast<double>(dim);
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) += shift;
  for (Eigen::Index i = 0; i < h.rows(); ++i) h(i, i) = complex(h(i, i).real(), 0.0);
  return h;
}

// Positive semidefinite with unit trace, weighted towards low levels so
// that truncation effects stay small.
inline MatrixXcd random_state(std::size_t dim, std::mt19937& rng, double decay = 0.0) {
  MatrixXcd b = random_complex(dim, rng);
  for (Eigen::Index i = 0; i < b.rows(); ++i) b.row(i) *= std::exp(-decay * static_cast<double>(i));
  MatrixXcd rho = b * b.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline double max_abs(const MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

// Undeformed truncated lowering operator a on |0>..|dim-1>.
inline MatrixXcd lowering(std::size_t dim) {
  MatrixXcd a = MatrixXcd::Zero(dim, dim);
  for (std::size_t n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

// Per-level environment data of the oracle, indexed by level k.
struct OracleLevels {
  std::vector<double> down;  // 2 D_+(k) + lambda
  std::vector<double> up;    // 2 D_+(k) - lambda
  std::vector<complex> z;    // D_-(k) + i D_pq(k)
};

// Operator-product form of the number-representation master equation:
//   -i[H, rho] + 1/2{G_d, a rho a^+} + 1/2{G_u, a^+ rho a} - 1/2{K, rho}
//   + squeeze terms,
// with K = a^+ G_d a + a G_u' a^+ built from truncated products. Written
// with dense matrices so it shares no code with the sparse stencil.
inline MatrixXcd oracle_image(const std::vector<double>& energies, const OracleLevels& lv, const MatrixXcd& rho) {
  const auto dim = static_cast<std::size_t>(rho.rows());
  const MatrixXcd a = lowering(dim);
  const MatrixXcd ad = a.adjoint();
  MatrixXcd h = MatrixXcd::Zero(dim, dim);
  MatrixXcd g_down = MatrixXcd::Zero(dim, dim);
  MatrixXcd g_up_shift = MatrixXcd::Zero(dim, dim);  // up(k - 1) at k
  MatrixXcd z = MatrixXcd::Zero(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    h(k, k) = energies[k];
    if (k + 1 < dim) {
      g_down(k, k) = lv.down[k];
      z(k, k) = lv.z[k];
    }
    if (k >= 1) g_up_shift(k, k) = lv.up[k - 1];
  }
  const MatrixXcd zc = z.conjugate();
  // a G_u' a^+ has (k, k) entry (k + 1) up(k) and vanishes at the top.
  const MatrixXcd k_op = ad * g_down * a + a * g_up_shift * ad;

  const complex i(0.0, 1.0);
  MatrixXcd out = -i * (h * rho - rho * h);
  const MatrixXcd down_jump = a * rho * ad;
  const MatrixXcd up_jump = ad * rho * a;
  out += 0.5 * (g_down * down_jump + down_jump * g_down);
  out += 0.5 * (g_up_shift * up_jump + up_jump * g_up_shift);
  out -= 0.5 * (k_op * rho + rho * k_op);

  out += a * zc * a * rho + rho * ad * z * ad;
  out += ad * ad * z * rho + rho * zc * a * a;
  out -= zc * a * rho * a + a * rho * zc * a;
  out -= ad * z * rho * ad + ad * rho * ad * z;
  return out;
}

// Closed form 2 D_+ -+ lambda for a thermal bath, lambda [coth(x / 2) -+ 1].
inline double thermal_up(double lambda, double beta, double omega_shift) {
  if (std::isinf(beta)) return 0.0;
  const double x = beta * omega_shift;
  return lambda * (std::cosh(x / 2) / std::sinh(x / 2) - 1.0);
}

inline double thermal_down(double lambda, double beta, double omega_shift) {
  if (std::isinf(beta)) return 2.0 * lambda;
  const double x = beta * omega_shift;
  return lambda * (std::cosh(x / 2) / std::sinh(x / 2) + 1.0);
}

// sinh(n tau) / sinh(tau) straight from the definition (tau > 0, small n tau).
inline double bracket_direct(double n, double tau) {
  if (tau == 0.0) return n;
  return std::sinh(n * tau) / std::sinh(tau);
}

}  // namespace testing_support
