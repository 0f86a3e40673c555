#include "defosc/density_matrix.hpp"

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "defosc/errors.hpp"

namespace defosc {

double hermiticity_defect(const Eigen::MatrixXcd& m) {
  if (m.size() == 0) return 0.0;
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

DensityMatrix DensityMatrix::unchecked(Eigen::MatrixXcd entries) {
  if (entries.rows() != entries.cols()) throw DimensionMismatchError("density matrix must be square");
  return DensityMatrix(std::move(entries));
}

DensityMatrix DensityMatrix::from_matrix(Eigen::MatrixXcd entries) {
  DensityMatrix rho = unchecked(std::move(entries));
  if (rho.dim() < 2) throw DomainError("density matrix dimension must be at least 2");
  if (!rho.entries_.allFinite()) throw DomainError("density matrix has non-finite entries");
  if (rho.hermiticity_defect() > kHermitianTol) throw DomainError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - 1.0) > kTraceTol) throw DomainError("density matrix trace differs from 1");
  if (rho.min_eigenvalue() < kEigenTol) throw DomainError("density matrix is not positive semidefinite");
  return rho;
}

DensityMatrix DensityMatrix::fock(std::size_t dim, std::size_t n) {
  if (dim < 2) throw DomainError("density matrix dimension must be at least 2");
  if (n >= dim) throw RangeError("Fock level " + std::to_string(n) + " outside basis");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = 1.0;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::diagonal(std::span<const double> weights) {
  if (weights.size() < 2) throw DomainError("density matrix dimension must be at least 2");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0) throw DomainError("diagonal weights must be finite and nonnegative");
    total += w;
  }
  if (!(total > 0.0)) throw DomainError("diagonal weights sum to zero");
  const auto dim = static_cast<Eigen::Index>(weights.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index k = 0; k < dim; ++k) m(k, k) = weights[static_cast<std::size_t>(k)] / total;
  return DensityMatrix(std::move(m));
}

DensityMatrix DensityMatrix::thermal(const Deformation& def, std::size_t dim, double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  if (std::isinf(beta)) return fock(dim, 0);
  std::vector<double> weights(dim);
  const double e0 = def.structure(1);
  for (std::size_t n = 0; n < dim; ++n) {
    const double scaled = def.structure(n + 1) + def.structure(n);
    weights[n] = std::exp(-0.5 * beta * (scaled - e0));
  }
  return diagonal(weights);
}

DensityMatrix DensityMatrix::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open density matrix file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DomainError("density matrix file " + path.string() + ": " + e.what());
  }
  if (!doc.contains("re")) throw DomainError("density matrix file lacks \"re\"");
  const auto& re = doc.at("re");
  const auto dim = static_cast<Eigen::Index>(re.size());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  try {
    for (Eigen::Index r = 0; r < dim; ++r) {
      const auto& row = re.at(static_cast<std::size_t>(r));
      if (static_cast<Eigen::Index>(row.size()) != dim) throw DomainError("density matrix file: ragged \"re\"");
      for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    if (doc.contains("im")) {
      const auto& im = doc.at("im");
      if (static_cast<Eigen::Index>(im.size()) != dim) throw DomainError("density matrix file: \"im\" shape");
      for (Eigen::Index r = 0; r < dim; ++r) {
        const auto& row = im.at(static_cast<std::size_t>(r));
        if (static_cast<Eigen::Index>(row.size()) != dim) throw DomainError("density matrix file: ragged \"im\"");
        for (Eigen::Index c = 0; c < dim; ++c) m(r, c).imag(row.at(static_cast<std::size_t>(c)).get<double>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("density matrix file: ") + e.what());
  }
  return from_matrix(std::move(m));
}

double DensityMatrix::hermiticity_defect() const { return defosc::hermiticity_defect(entries_); }

double DensityMatrix::min_eigenvalue() const {
  const Eigen::MatrixXcd herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

}  // namespace defosc
