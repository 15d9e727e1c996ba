#pragma once

// Reference computations used only by the tests. None of them calls into the
// library code they check.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M = Eigen::MatrixXcd;
using V = Eigen::VectorXcd;

constexpr double kHbar = 0.6582119569;  // ueV ns
constexpr double kH = 4.135667696;      // ueV ns
constexpr double kPi = 3.141592653589793;

inline M sx() { M m(2, 2); m << 0, 1, 1, 0; return m; }
inline M sy() { M m(2, 2); m << 0, C(0, -1), C(0, 1), 0; return m; }
inline M sz() { M m(2, 2); m << 1, 0, 0, -1; return m; }
inline M id(int n) { return M::Identity(n, n); }

inline M kron(const M& a, const M& b) {
  M out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Pauli `p` acting on electron k (0-based) of n; electron 0 is the leftmost factor.
inline M on(const M& p, int k, int n) {
  M out = M::Identity(1, 1);
  for (int i = 0; i < n; ++i) out = kron(out, i == k ? p : id(2));
  return out;
}

inline M dot(int a, int b, int n) {
  return on(sx(), a, n) * on(sx(), b, n) + on(sy(), a, n) * on(sy(), b, n) + on(sz(), a, n) * on(sz(), b, n);
}

// exp(A) by scaling and squaring of a truncated Taylor series.
inline M expm_taylor(const M& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::pow(2.0, s) > 0.25) ++s;
  const M b = a / std::pow(2.0, s);
  M term = M::Identity(a.rows(), a.cols());
  M sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * b / static_cast<double>(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

inline M propagator(const M& h, double t) { return expm_taylor(C(0, -t / kHbar) * h); }

// Classic RK4 on i hbar dpsi/dt = H(t) psi.
inline V rk4(const std::function<M(double)>& h, V psi, double t0, double t1, int steps) {
  const double dt = (t1 - t0) / steps;
  auto f = [&](double t, const V& y) -> V { return C(0, -1.0 / kHbar) * (h(t) * y); };
  for (int i = 0; i < steps; ++i) {
    const double t = t0 + i * dt;
    const V k1 = f(t, psi);
    const V k2 = f(t + dt / 2, psi + dt / 2 * k1);
    const V k3 = f(t + dt / 2, psi + dt / 2 * k2);
    const V k4 = f(t + dt, psi + dt * k3);
    psi += dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
  }
  return psi;
}

inline double overlap2(const V& a, const V& b) { return std::norm(a.dot(b)); }

}  // namespace oracle
