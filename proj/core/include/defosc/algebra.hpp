#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace defosc {

enum class DeformationKind { identity, q_deformed, custom };

/// Deformation function f(n) of the f-oscillator A = a f(N).
///
/// The structure function F(n) = n f^2(n) is what every matrix element uses.
/// For the q-oscillator F(n) = [n] = sinh(n tau) / sinh(tau) with tau = |ln q|;
/// a custom table lists f(1), f(2), ..., f(n_max).
class Deformation {
 public:
  static Deformation identity();
  /// Negative tau is folded to |tau|: [n] is even in tau, i.e. q and 1/q coincide.
  static Deformation q_deformed(double tau);
  static Deformation from_q(double q);
  /// Entries must be finite and nonnegative; table[k] is f(k + 1).
  static Deformation custom(std::vector<double> table);

  DeformationKind kind() const noexcept { return kind_; }
  double tau() const noexcept { return tau_; }
  std::span<const double> table() const noexcept { return table_; }

  /// Largest n for which F(n) is available.
  std::size_t max_level() const noexcept;

  /// F(n). F(0) = 0 for every kind.
  double structure(std::size_t n) const;
  /// f(n) for n >= 1; f(0) never enters a matrix element and is rejected.
  double factor(std::size_t n) const;

 private:
  Deformation(DeformationKind kind, double tau, std::vector<double> table)
      : kind_(kind), tau_(tau), table_(std::move(table)) {}

  DeformationKind kind_;
  double tau_ = 0.0;
  std::vector<double> table_;
};

/// q-bracket [n] = sinh(n tau) / sinh(tau), evaluated in the log domain once n tau > 30.
double q_bracket(double n, double tau);

/// Oscillator frequency and truncation dimension (basis |0>..|dim-1>), hbar = m = k = 1.
struct ModeParams {
  double omega = 1.0;
  std::size_t dim = 32;

  void validate() const;
};

double structure_value(const Deformation& def, std::size_t n);
double deformation_factor(const Deformation& def, std::size_t n);

/// E_n = (omega / 2) [F(n + 1) + F(n)].
double energy_level(const Deformation& def, const ModeParams& mode, std::size_t n);

/// Omega(n) = [F(n + 2) - F(n)] / 2, the spacing (E_{n+1} - E_n) / omega.
double omega_shift(const Deformation& def, std::size_t n);

struct SpectrumTable {
  std::vector<double> energies;     // E_0 .. E_{dim-1}
  std::vector<double> omega_shift;  // Omega(0) .. Omega(dim-1)
  std::vector<double> structure;    // F(0) .. F(dim)
};

/// Needs F up to dim + 1 (for Omega(dim - 1)).
SpectrumTable spectrum(const Deformation& def, const ModeParams& mode);

struct LadderMatrices {
  Eigen::MatrixXd lowering;  // A[n-1, n] = sqrt(F(n))
  Eigen::MatrixXd raising;   // A^dagger[n, n-1] = sqrt(F(n))
};

LadderMatrices ladder_elements(const Deformation& def, const ModeParams& mode);

}  // namespace defosc
