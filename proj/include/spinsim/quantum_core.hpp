#pragma once

#include <complex>

#include <Eigen/Dense>

#include "spinsim/units.hpp"

namespace spinsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using StateVector = Eigen::VectorXcd;
using Matrix2 = Eigen::Matrix2cd;

/// Pauli decomposition H = a0*I + ax*sx + ay*sy + az*sz of a 2x2 Hermitian
/// operator. Coefficients carry energy units (ueV).
struct PauliVector {
  double a0 = 0.0;
  double ax = 0.0;
  double ay = 0.0;
  double az = 0.0;

  Matrix2 to_matrix() const;
  static PauliVector from_matrix(const Matrix2& h);
};

Matrix2 pauli_x();
Matrix2 pauli_y();
Matrix2 pauli_z();

/// exp(-i H t / hbar) for H = a0 I + a.sigma, in closed form.
Matrix2 pauli_expm(double a0, double ax, double ay, double az, double t,
                   double hbar = units::kHbar);
Matrix2 pauli_expm(const PauliVector& h, double t, double hbar = units::kHbar);

/// exp(-i H t / hbar) through the spectral decomposition of H. Any dimension.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t,
                             double hbar = units::kHbar);

bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-12);
bool is_unitary(const ComplexMatrix& u, double tol = 1e-10);
/// max |(U^dagger U - I)_ij|
double unitarity_defect(const ComplexMatrix& u);

/// Positive semidefinite square root via Hermitian eigendecomposition;
/// negative eigenvalues (numerical noise) are clamped to zero.
ComplexMatrix psd_sqrt(const ComplexMatrix& m);

/// A validated density matrix (unit trace, Hermitian, positive semidefinite).
class DensityMatrix {
 public:
  /// Tolerance used when accepting a matrix as a density matrix.
  static constexpr double kTolerance = 1e-10;

  explicit DensityMatrix(ComplexMatrix rho);

  static DensityMatrix from_pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(Eigen::Index dim);

  const ComplexMatrix& matrix() const { return rho_; }
  Eigen::Index dim() const { return rho_.rows(); }
  double purity() const;

  /// U rho U^dagger.
  DensityMatrix evolved(const ComplexMatrix& u) const;

 private:
  ComplexMatrix rho_;
};

/// Uhlmann fidelity [Tr sqrt(sqrt(a) b sqrt(a))]^2, clamped to [0, 1].
double state_fidelity(const DensityMatrix& ideal, const DensityMatrix& real);
/// <psi|rho|psi> for a normalized pure ideal state.
double pure_state_fidelity(const StateVector& psi, const DensityMatrix& real);
/// Half the trace norm of the difference.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double norm() const;
};

BlochVector bloch_vector(const DensityMatrix& rho);

}  // namespace spinsim
