#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/quantum_core.hpp"

using namespace spinsim;

namespace {

ComplexMatrix random_hermitian(std::mt19937_64& rng, int n, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  return 0.5 * (a + a.adjoint());
}

DensityMatrix random_density(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = Complex(g(rng), g(rng));
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(rho);
}

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST(PauliExpm, ZeroGeneratorIsIdentity) {
  EXPECT_LT(max_abs(pauli_expm(0, 0, 0, 0, 3.7) - Matrix2::Identity()), 1e-15);
}

TEST(PauliExpm, HalfTurnAboutX) {
  const double t = 2.0;
  const Matrix2 u = pauli_expm(0, units::kHbar * units::kPi / (2 * t), 0, 0, t);
  EXPECT_LT(max_abs(u - Complex(0, -1) * pauli_x()), 1e-14);
}

TEST(PauliExpm, MatchesTaylorOracle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 200; ++k) {
    const double a0 = u(rng), ax = u(rng), ay = u(rng), az = u(rng), t = std::abs(u(rng)) * 5;
    const ComplexMatrix h = PauliVector{a0, ax, ay, az}.to_matrix();
    EXPECT_LT(max_abs(pauli_expm(a0, ax, ay, az, t) - oracle::propagator(h, t)), 1e-12);
  }
}

TEST(PauliExpm, RejectsNonFinite) {
  EXPECT_THROW(pauli_expm(0, std::nan(""), 0, 0, 1.0), std::invalid_argument);
}

TEST(PauliVector, RoundTrip) {
  const PauliVector p{0.3, -1.2, 0.7, 2.5};
  const PauliVector q = PauliVector::from_matrix(p.to_matrix());
  EXPECT_NEAR(q.a0, p.a0, 1e-15);
  EXPECT_NEAR(q.ax, p.ax, 1e-15);
  EXPECT_NEAR(q.ay, p.ay, 1e-15);
  EXPECT_NEAR(q.az, p.az, 1e-15);
}

TEST(ExpmHermitian, AgreesWithPauliExpmAndOracle) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 50; ++k) {
    const ComplexMatrix h2 = random_hermitian(rng, 2, 1.0);
    const PauliVector p = PauliVector::from_matrix(h2);
    EXPECT_LT(max_abs(expm_hermitian(h2, 1.3) - pauli_expm(p, 1.3)), 1e-12);
    const ComplexMatrix h8 = random_hermitian(rng, 8, 1.0);
    EXPECT_LT(max_abs(expm_hermitian(h8, 0.9) - oracle::propagator(h8, 0.9)), 1e-11);
  }
}

TEST(ExpmHermitian, ZeroAndInverse) {
  std::mt19937_64 rng(3);
  EXPECT_LT(max_abs(expm_hermitian(ComplexMatrix::Zero(4, 4), 5.0) - ComplexMatrix::Identity(4, 4)), 1e-15);
  const ComplexMatrix h = random_hermitian(rng, 4, 2.0);
  EXPECT_LT(max_abs(expm_hermitian(h, 2.1) * expm_hermitian(h, -2.1) - ComplexMatrix::Identity(4, 4)), 1e-10);
}

TEST(ExpmHermitian, RejectsNonHermitian) {
  ComplexMatrix h = ComplexMatrix::Zero(2, 2);
  h(0, 1) = 1.0;
  EXPECT_THROW(expm_hermitian(h, 1.0), std::invalid_argument);
}

TEST(Property, PropagatorUnitarity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> t(-50, 50);
  for (int k = 0; k < 500; ++k) {
    const int n = (k % 3 == 0) ? 2 : (k % 3 == 1 ? 4 : 8);
    EXPECT_LT(unitarity_defect(expm_hermitian(random_hermitian(rng, n, 3.0), t(rng))), 1e-10);
  }
}

TEST(DensityMatrix, Validation) {
  ComplexMatrix bad_trace = ComplexMatrix::Identity(2, 2);
  EXPECT_THROW(DensityMatrix{bad_trace}, std::invalid_argument);
  ComplexMatrix negative(2, 2);
  negative << 1.2, 0, 0, -0.2;
  EXPECT_THROW(DensityMatrix{negative}, std::invalid_argument);
  ComplexMatrix non_hermitian(2, 2);
  non_hermitian << 0.5, 0.3, 0.1, 0.5;
  EXPECT_THROW(DensityMatrix{non_hermitian}, std::invalid_argument);
  EXPECT_THROW(DensityMatrix{ComplexMatrix::Identity(2, 3)}, std::invalid_argument);
  EXPECT_NO_THROW(DensityMatrix::maximally_mixed(4));
}

TEST(Fidelity, SelfOrthogonalAndNoOpBaseline) {
  std::mt19937_64 rng(13);
  for (int k = 0; k < 20; ++k) {
    const DensityMatrix rho = random_density(rng, 2);
    EXPECT_NEAR(state_fidelity(rho, rho), 1.0, 1e-10);
  }
  StateVector up(2), down(2);
  up << 1, 0;
  down << 0, 1;
  EXPECT_NEAR(state_fidelity(DensityMatrix::from_pure(up), DensityMatrix::from_pure(down)), 0.0, 1e-15);

  StateVector psi0(2);
  psi0 << 1 / std::sqrt(2.0), Complex(0, 1 / std::sqrt(2.0));
  const Matrix2 rx = pauli_expm(0, units::kHbar * units::kPi / 4, 0, 0, 1.0);  // R_x(pi/2)
  const StateVector target = rx * psi0;
  EXPECT_NEAR(pure_state_fidelity(target, DensityMatrix::from_pure(psi0)), 0.5, 1e-15);
}

// Fidelity of a pure ideal against any state reduces to <psi|rho|psi>.
TEST(Property, FidelityBoundsAndPureReduction) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int k = 0; k < 10000; ++k) {
    const DensityMatrix a = random_density(rng, 2);
    const DensityMatrix b = random_density(rng, 2);
    const double f = state_fidelity(a, b);
    ASSERT_GE(f, 0.0);
    ASSERT_LE(f, 1.0);
    ASSERT_NEAR(f, state_fidelity(b, a), 1e-9);
    StateVector psi(2);
    psi << Complex(g(rng), g(rng)), Complex(g(rng), g(rng));
    psi.normalize();
    const double direct = (psi.adjoint() * b.matrix() * psi)(0, 0).real();
    ASSERT_NEAR(pure_state_fidelity(psi, b), direct, 1e-12);
    ASSERT_NEAR(state_fidelity(DensityMatrix::from_pure(psi), b), direct, 1e-7);
  }
}

TEST(TraceDistance, BoundsAndRelationToFidelity) {
  std::mt19937_64 rng(19);
  for (int k = 0; k < 1000; ++k) {
    const DensityMatrix a = random_density(rng, 2);
    const DensityMatrix b = random_density(rng, 2);
    const double d = trace_distance(a, b);
    const double f = state_fidelity(a, b);
    ASSERT_GE(d, 0.0);
    ASSERT_LE(d, 1.0 + 1e-12);
    // Fuchs-van de Graaf inequalities.
    ASSERT_LE(1 - std::sqrt(f), d + 1e-9);
    ASSERT_LE(d, std::sqrt(1 - f) + 1e-9);
  }
}

TEST(Bloch, KnownStates) {
  StateVector up(2);
  up << 1, 0;
  auto b = bloch_vector(DensityMatrix::from_pure(up));
  EXPECT_NEAR(b.z, 1.0, 1e-15);
  b = bloch_vector(DensityMatrix::maximally_mixed(2));
  EXPECT_NEAR(std::hypot(b.x, b.y, b.z), 0.0, 1e-15);
  StateVector psi0(2);
  psi0 << 1 / std::sqrt(2.0), Complex(0, 1 / std::sqrt(2.0));
  b = bloch_vector(DensityMatrix::from_pure(psi0));
  EXPECT_NEAR(b.x, 0.0, 1e-15);
  EXPECT_NEAR(b.y, 1.0, 1e-15);
  EXPECT_NEAR(b.z, 0.0, 1e-15);
}
