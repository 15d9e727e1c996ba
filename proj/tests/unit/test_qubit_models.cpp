#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "spinsim/qubit_models.hpp"

using namespace spinsim;
using oracle::C;
using oracle::M;

namespace {

double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

// 1/2 dEz (s1z - s2z) + 1/4 J s1.s2, built from Kronecker products.
M st_oracle(double dez, double j) {
  return 0.5 * dez * (oracle::on(oracle::sz(), 0, 2) - oracle::on(oracle::sz(), 1, 2)) + 0.25 * j * oracle::dot(0, 1, 2);
}

M hy_oracle(double ez, double j, double j1, double j2) {
  M zeeman = M::Zero(8, 8);
  for (int k = 0; k < 3; ++k) zeeman += oracle::on(oracle::sz(), k, 3);
  return 0.5 * ez * zeeman + 0.25 * j * oracle::dot(0, 1, 3) + 0.25 * j1 * oracle::dot(0, 2, 3) +
         0.25 * j2 * oracle::dot(1, 2, 3);
}

}  // namespace

TEST(SSHamiltonian, CaptionParameters) {
  const SSParams p{1e6, 0.0};
  const double omega = units::hz_to_rad_per_ns(1e6);
  EXPECT_NEAR(p.omega(), omega, 1e-15);
  const ComplexMatrix h = build_ss_hamiltonian(p, omega, 0.0);
  EXPECT_LT(max_abs(h - 0.5 * units::kHbar * omega * ComplexMatrix(pauli_x())), 1e-18);
  EXPECT_LT(max_abs(build_ss_hamiltonian(0.0, 0.0, 0.0)), 1e-300);
}

TEST(SSHamiltonian, PhaseQuarterTurnIsSigmaY) {
  const double omega = 0.37;
  const ComplexMatrix h = build_ss_hamiltonian(0.0, 0.0, omega);
  EXPECT_LT(max_abs(h - 0.5 * units::kHbar * omega * ComplexMatrix(pauli_y())), 1e-18);
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(h);
  EXPECT_NEAR(eig.eigenvalues()(0), -0.5 * units::kHbar * omega, 1e-15);
  EXPECT_NEAR(eig.eigenvalues()(1), 0.5 * units::kHbar * omega, 1e-15);
}

TEST(STHamiltonian, MatchesKroneckerOracle) {
  EXPECT_LT(max_abs(build_st_full(0, 0)), 1e-300);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 20; ++k) {
    const double dez = u(rng), j = u(rng);
    EXPECT_LT(max_abs(build_st_full(dez, j) - st_oracle(dez, j)), 1e-14);
  }
}

TEST(STHamiltonian, ExchangeSpectrum) {
  const double j = 0.7;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(build_st_full(0.0, j));
  EXPECT_NEAR(eig.eigenvalues()(0), -0.75 * j, 1e-14);
  for (int i = 1; i < 4; ++i) EXPECT_NEAR(eig.eigenvalues()(i), 0.25 * j, 1e-14);
}

TEST(STHamiltonian, SingletTripletCoupling) {
  const double dez = 0.032;
  oracle::V s(4), t0(4);
  s << 0, 1, -1, 0;
  t0 << 0, 1, 1, 0;
  s /= std::sqrt(2.0);
  t0 /= std::sqrt(2.0);
  const C elem = s.dot(build_st_full(dez, 0.7) * t0);
  EXPECT_NEAR(std::abs(elem), dez, 1e-15);
}

TEST(STProjection, EffectiveHamiltonian) {
  const double dez = 0.032, j = 0.7;
  const LogicalBasis b = st_logical_basis();
  ASSERT_TRUE(b.is_orthonormal());
  const Matrix2 h = project_to_logical(build_st_full(dez, j), b);
  const Matrix2 expected = dez * pauli_x() - 0.5 * j * pauli_z() - 0.25 * j * Matrix2::Identity();
  EXPECT_LT(max_abs(h - expected), 1e-15);
  EXPECT_LT(max_abs(project_to_logical(ComplexMatrix::Identity(4, 4), b) - Matrix2::Identity()), 1e-15);
  const QubitModel model = QubitModel::singlet_triplet(STParams{j, dez});
  const std::vector<double> ch{dez, j};
  EXPECT_LT(max_abs(model.logical_hamiltonian(ch).to_matrix() - expected), 1e-15);
}

TEST(HYHamiltonian, MatchesKroneckerOracleAndConservesSpin) {
  EXPECT_LT(max_abs(build_hy_full(0, 0, 0, 0)), 1e-300);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2, 2);
  const ComplexMatrix sz = total_sz(3), s2 = total_s_squared(3);
  for (int k = 0; k < 20; ++k) {
    const double ez = u(rng), j = u(rng), j1 = u(rng), j2 = u(rng);
    const ComplexMatrix h = build_hy_full(ez, j, j1, j2);
    EXPECT_LT(max_abs(h - hy_oracle(ez, j, j1, j2)), 1e-14);
    EXPECT_LT(max_abs(h * sz - sz * h), 1e-12);
    EXPECT_LT(max_abs(h * s2 - s2 * h), 1e-12);
  }
}

TEST(HYProjection, BruteForceInnerProducts) {
  const LogicalBasis b = hy_logical_basis();
  ASSERT_TRUE(b.is_orthonormal());
  // Logical states carry S = 1/2, S_z = +1/2.
  for (const auto& v : {b.zero, b.one}) {
    EXPECT_NEAR((total_sz(3) * v - 0.5 * v).norm(), 0.0, 1e-14);
    EXPECT_NEAR((total_s_squared(3) * v - 0.75 * v).norm(), 0.0, 1e-14);
  }
  const double ez = 10, j = 0.5, j1 = 1.0, j2 = 1.0;
  const M h = hy_oracle(ez, j, j1, j2);
  EXPECT_NEAR(std::abs(b.zero.dot(h * b.one)), 0.0, 1e-14);
  EXPECT_NEAR((b.one.dot(h * b.one) - b.zero.dot(h * b.zero)).real(), -0.5, 1e-14);

  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int k = 0; k < 20; ++k) {
    const double e = u(rng), a = u(rng), a1 = u(rng), a2 = u(rng);
    const Matrix2 p = project_to_logical(build_hy_full(e, a, a1, a2), b);
    EXPECT_NEAR(p(0, 0).real(), e / 2 - 0.75 * a, 1e-13);
    EXPECT_NEAR(p(1, 1).real(), e / 2 + 0.25 * a - 0.5 * (a1 + a2), 1e-13);
    EXPECT_NEAR(std::abs(p(0, 1)), std::sqrt(3.0) / 4 * std::abs(a1 - a2), 1e-13);
    const QubitModel model = QubitModel::hybrid(HYParams{e > 0 ? e : -e, 0.5, 1.0});
    const std::vector<double> ch{a, a1, a2};
    const Matrix2 closed = model.logical_hamiltonian(ch).to_matrix();
    EXPECT_LT(max_abs(closed - project_to_logical(model.full_hamiltonian(ch), b)), 1e-13);
  }
}

TEST(Leakage, InvariantSubspaces) {
  const oracle::V psi0 = [] {
    oracle::V v(2);
    v << 1 / std::sqrt(2.0), C(0, 1 / std::sqrt(2.0));
    return v;
  }();
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(0.5 * i);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 2);
  for (int k = 0; k < 10; ++k) {
    EXPECT_LT(leakage_check(build_st_full(u(rng), u(rng)), st_logical_basis(), psi0, t), 1e-10);
  }
  EXPECT_LT(leakage_check(build_hy_full(10, 0.5, 1.0, 1.0), hy_logical_basis(), psi0, t), 1e-10);
  EXPECT_LT(leakage_check(build_hy_full(10, 0.5, 1.0, 0.0), hy_logical_basis(), psi0, t), 1e-10);
  EXPECT_LT(leakage_check(ComplexMatrix::Zero(8, 8), hy_logical_basis(), psi0, t), 1e-15);
}

TEST(QubitModel, Channels) {
  const QubitModel ss = QubitModel::single_spin({});
  ASSERT_EQ(ss.channels().size(), 3u);
  EXPECT_EQ(ss.channels()[0].name, "omega_x");
  EXPECT_FALSE(ss.channels()[2].pulsed);
  const QubitModel st = QubitModel::singlet_triplet({});
  ASSERT_EQ(st.channels().size(), 2u);
  EXPECT_EQ(st.full_dimension(), 4);
  const QubitModel hy = QubitModel::hybrid({});
  ASSERT_EQ(hy.channels().size(), 3u);
  EXPECT_EQ(hy.full_dimension(), 8);
  EXPECT_TRUE(QubitModel::no_operation().channels().empty());
  EXPECT_EQ(parse_qubit_kind("hy"), QubitKind::hy);
  EXPECT_THROW(parse_qubit_kind("xx"), std::invalid_argument);
}

TEST(QubitModel, RejectsBadParameters) {
  EXPECT_ANY_THROW(QubitModel::single_spin(SSParams{-1.0, 0.0}));
  EXPECT_ANY_THROW(QubitModel::singlet_triplet(STParams{0.7, std::nan("")}));
  EXPECT_ANY_THROW(QubitModel::hybrid(HYParams{10.0, 0.5, -1.0}));
}
