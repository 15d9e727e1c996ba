#include "spinsim/quantum_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace spinsim {

namespace {

constexpr Complex kI{0.0, 1.0};

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) {
    throw std::invalid_argument(std::string("non-finite ") + what);
  }
}

}  // namespace

Matrix2 pauli_x() {
  Matrix2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

Matrix2 pauli_y() {
  Matrix2 m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}

Matrix2 pauli_z() {
  Matrix2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

Matrix2 PauliVector::to_matrix() const {
  Matrix2 m;
  m << Complex(a0 + az, 0.0), Complex(ax, -ay), Complex(ax, ay), Complex(a0 - az, 0.0);
  return m;
}

PauliVector PauliVector::from_matrix(const Matrix2& h) {
  PauliVector p;
  p.a0 = 0.5 * (h(0, 0).real() + h(1, 1).real());
  p.az = 0.5 * (h(0, 0).real() - h(1, 1).real());
  p.ax = 0.5 * (h(0, 1).real() + h(1, 0).real());
  p.ay = 0.5 * (h(1, 0).imag() - h(0, 1).imag());
  return p;
}

Matrix2 pauli_expm(double a0, double ax, double ay, double az, double t, double hbar) {
  require_finite(a0, "a0");
  require_finite(ax, "ax");
  require_finite(ay, "ay");
  require_finite(az, "az");
  require_finite(t, "t");
  require_finite(hbar, "hbar");
  if (hbar <= 0.0) throw std::invalid_argument("pauli_expm: hbar must be positive");

  const double norm = std::sqrt(ax * ax + ay * ay + az * az);
  const double angle = norm * t / hbar;
  const double c = std::cos(angle);
  const double s = norm > 0.0 ? std::sin(angle) / norm : 0.0;
  const Complex phase = std::polar(1.0, -a0 * t / hbar);

  // cos(|a|t) I - i sin(|a|t) (a_hat . sigma)
  Matrix2 u;
  u(0, 0) = Complex(c, -s * az);
  u(0, 1) = Complex(-s * ay, -s * ax);
  u(1, 0) = Complex(s * ay, -s * ax);
  u(1, 1) = Complex(c, s * az);
  return phase * u;
}

Matrix2 pauli_expm(const PauliVector& h, double t, double hbar) {
  return pauli_expm(h.a0, h.ax, h.ay, h.az, t, hbar);
}

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t, double hbar) {
  if (h.rows() != h.cols()) throw std::invalid_argument("expm_hermitian: matrix not square");
  if (!is_hermitian(h)) throw std::invalid_argument("expm_hermitian: matrix not Hermitian");
  require_finite(t, "t");
  if (hbar <= 0.0) throw std::invalid_argument("expm_hermitian: hbar must be positive");

  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("expm_hermitian: eigendecomposition failed");
  }
  const auto& vals = eig.eigenvalues();
  Eigen::VectorXcd phases(vals.size());
  for (Eigen::Index k = 0; k < vals.size(); ++k) {
    phases(k) = std::polar(1.0, -vals(k) * t / hbar);
  }
  const ComplexMatrix& v = eig.eigenvectors();
  return v * phases.asDiagonal() * v.adjoint();
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

double unitarity_defect(const ComplexMatrix& u) {
  const ComplexMatrix id = ComplexMatrix::Identity(u.rows(), u.cols());
  return (u.adjoint() * u - id).cwiseAbs().maxCoeff();
}

bool is_unitary(const ComplexMatrix& u, double tol) {
  return u.rows() == u.cols() && unitarity_defect(u) < tol;
}

ComplexMatrix psd_sqrt(const ComplexMatrix& m) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(m);
  if (eig.info() != Eigen::Success) throw std::runtime_error("psd_sqrt: eigendecomposition failed");
  Eigen::VectorXd roots = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const ComplexMatrix& v = eig.eigenvectors();
  return v * roots.cast<Complex>().asDiagonal() * v.adjoint();
}

DensityMatrix::DensityMatrix(ComplexMatrix rho) : rho_(std::move(rho)) {
  if (rho_.rows() != rho_.cols() || rho_.rows() == 0) {
    throw std::invalid_argument("DensityMatrix: matrix must be square and nonempty");
  }
  if (!is_hermitian(rho_, kTolerance)) {
    throw std::invalid_argument("DensityMatrix: matrix not Hermitian");
  }
  const Complex tr = rho_.trace();
  if (std::abs(tr.real() - 1.0) > kTolerance || std::abs(tr.imag()) > kTolerance) {
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(rho_, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -kTolerance) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::from_pure(const StateVector& psi) {
  const double n = psi.norm();
  if (!(n > 0.0)) throw std::invalid_argument("DensityMatrix::from_pure: zero vector");
  const StateVector unit = psi / n;
  return DensityMatrix(unit * unit.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
  return DensityMatrix(ComplexMatrix::Identity(dim, dim) / static_cast<double>(dim));
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

DensityMatrix DensityMatrix::evolved(const ComplexMatrix& u) const {
  if (u.rows() != rho_.rows()) throw std::invalid_argument("DensityMatrix::evolved: dimension mismatch");
  ComplexMatrix next = u * rho_ * u.adjoint();
  // Remove the anti-Hermitian rounding residue so repeated evolution stays valid.
  next = 0.5 * (next + next.adjoint()).eval();
  return DensityMatrix(std::move(next));
}

double state_fidelity(const DensityMatrix& ideal, const DensityMatrix& real) {
  if (ideal.dim() != real.dim()) throw std::invalid_argument("state_fidelity: dimension mismatch");
  const ComplexMatrix s = psd_sqrt(ideal.matrix());
  ComplexMatrix inner = s * real.matrix() * s;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(inner, Eigen::EigenvaluesOnly);
  double root_sum = 0.0;
  for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k) {
    root_sum += std::sqrt(std::max(0.0, eig.eigenvalues()(k)));
  }
  return std::clamp(root_sum * root_sum, 0.0, 1.0);
}

double pure_state_fidelity(const StateVector& psi, const DensityMatrix& real) {
  if (psi.size() != real.dim()) throw std::invalid_argument("pure_state_fidelity: dimension mismatch");
  const Complex v = psi.dot(real.matrix() * psi);
  return std::clamp(v.real(), 0.0, 1.0);
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw std::invalid_argument("trace_distance: dimension mismatch");
  const ComplexMatrix diff = a.matrix() - b.matrix();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(diff, Eigen::EigenvaluesOnly);
  return 0.5 * eig.eigenvalues().cwiseAbs().sum();
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

BlochVector bloch_vector(const DensityMatrix& rho) {
  if (rho.dim() != 2) throw std::invalid_argument("bloch_vector: expected a 2x2 density matrix");
  const ComplexMatrix& m = rho.matrix();
  // Tr(rho sx) = 2 Re rho_01, Tr(rho sy) = -2 Im rho_01, Tr(rho sz) = rho_00 - rho_11
  return BlochVector{2.0 * m(0, 1).real(), -2.0 * m(0, 1).imag(),
                     m(0, 0).real() - m(1, 1).real()};
}

}  // namespace spinsim
