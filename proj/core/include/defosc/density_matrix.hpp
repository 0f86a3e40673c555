#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>

#include <Eigen/Dense>

#include "defosc/algebra.hpp"

namespace defosc {

using complex = std::complex<double>;

/// Density matrix rho_{mn} = <m|rho|n> on the truncated number basis.
///
/// `from_matrix` enforces the physical invariants (Hermitian and unit trace to
/// 1e-12, eigenvalues >= -1e-10). States produced by time integration are
/// wrapped with `unchecked` so that drift stays observable instead of throwing.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-12;
  static constexpr double kTraceTol = 1e-12;
  static constexpr double kEigenTol = -1e-10;

  static DensityMatrix from_matrix(Eigen::MatrixXcd entries);
  static DensityMatrix unchecked(Eigen::MatrixXcd entries);

  static DensityMatrix fock(std::size_t dim, std::size_t n);
  /// Normalizes nonnegative weights onto the diagonal.
  static DensityMatrix diagonal(std::span<const double> weights);
  /// Truncated, renormalized deformed Boltzmann state exp(-beta E_n / omega) / Z.
  static DensityMatrix thermal(const Deformation& def, std::size_t dim, double beta);
  /// JSON document {"re": [[...]], "im": [[...]]}; "im" may be omitted.
  static DensityMatrix from_file(const std::filesystem::path& path);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(entries_.rows()); }
  const Eigen::MatrixXcd& matrix() const noexcept { return entries_; }
  complex operator()(std::size_t m, std::size_t n) const {
    return entries_(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
  }

  complex trace() const { return entries_.trace(); }
  /// max |rho_{mn} - conj(rho_{nm})|
  double hermiticity_defect() const;
  /// Smallest eigenvalue of the Hermitian part.
  double min_eigenvalue() const;

 private:
  explicit DensityMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {}

  Eigen::MatrixXcd entries_;
};

double hermiticity_defect(const Eigen::MatrixXcd& m);

}  // namespace defosc
