#include "spinsim/qubit_models.hpp"

#include <cmath>
#include <stdexcept>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;

Eigen::Vector2cd up() { return Eigen::Vector2cd(1.0, 0.0); }
Eigen::Vector2cd down() { return Eigen::Vector2cd(0.0, 1.0); }

StateVector kron(const StateVector& a, const StateVector& b) {
  StateVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

void require_nonnegative(double v, const char* name) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ConfigError(std::string(name) + " must be finite and >= 0");
  }
}

}  // namespace

std::string_view to_string(QubitKind kind) {
  switch (kind) {
    case QubitKind::ss: return "ss";
    case QubitKind::st: return "st";
    case QubitKind::hy: return "hy";
    case QubitKind::noop: return "noop";
  }
  return "?";
}

QubitKind parse_qubit_kind(std::string_view name) {
  if (name == "ss") return QubitKind::ss;
  if (name == "st") return QubitKind::st;
  if (name == "hy") return QubitKind::hy;
  if (name == "noop") return QubitKind::noop;
  throw std::invalid_argument("unknown qubit type '" + std::string(name) + "'");
}

double SSParams::omega() const { return units::hz_to_rad_per_ns(omega_over_2pi_hz); }
double SSParams::delta_omega_z() const {
  return units::hz_to_rad_per_ns(delta_omega_z_over_2pi_hz);
}

void SSParams::validate() const {
  if (!std::isfinite(omega_over_2pi_hz) || omega_over_2pi_hz <= 0.0) {
    throw ConfigError("ss.omega_over_2pi_hz must be > 0");
  }
  if (!std::isfinite(delta_omega_z_over_2pi_hz)) {
    throw ConfigError("ss.delta_omega_z_over_2pi_hz must be finite");
  }
}

void STParams::validate() const {
  require_nonnegative(j, "st.j");
  require_nonnegative(delta_ez, "st.delta_ez");
}

void HYParams::validate() const {
  if (!std::isfinite(jmax) || jmax <= 0.0) throw ConfigError("hy.jmax must be > 0");
  require_nonnegative(j, "hy.j");
  if (!std::isfinite(ez)) throw ConfigError("hy.ez must be finite");
}

ComplexMatrix LogicalBasis::isometry() const {
  ComplexMatrix b(zero.size(), 2);
  b.col(0) = zero;
  b.col(1) = one;
  return b;
}

StateVector LogicalBasis::embed(const StateVector& logical) const {
  if (logical.size() != 2) throw std::invalid_argument("LogicalBasis::embed: expected a 2-vector");
  return logical(0) * zero + logical(1) * one;
}

bool LogicalBasis::is_orthonormal(double tol) const {
  return std::abs(zero.squaredNorm() - 1.0) < tol && std::abs(one.squaredNorm() - 1.0) < tol &&
         std::abs(zero.dot(one)) < tol;
}

ComplexMatrix spin_operator(const Matrix2& pauli, int electron, int electron_count) {
  if (electron < 0 || electron >= electron_count) {
    throw std::invalid_argument("spin_operator: electron index out of range");
  }
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int k = 0; k < electron_count; ++k) {
    out = kron(out, k == electron ? ComplexMatrix(pauli) : ComplexMatrix(ComplexMatrix::Identity(2, 2)));
  }
  return out;
}

ComplexMatrix exchange_operator(int a, int b, int electron_count) {
  return spin_operator(pauli_x(), a, electron_count) * spin_operator(pauli_x(), b, electron_count) +
         spin_operator(pauli_y(), a, electron_count) * spin_operator(pauli_y(), b, electron_count) +
         spin_operator(pauli_z(), a, electron_count) * spin_operator(pauli_z(), b, electron_count);
}

ComplexMatrix total_sz(int electron_count) {
  const Eigen::Index dim = Eigen::Index{1} << electron_count;
  ComplexMatrix sz = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < electron_count; ++k) sz += 0.5 * spin_operator(pauli_z(), k, electron_count);
  return sz;
}

ComplexMatrix total_s_squared(int electron_count) {
  const Eigen::Index dim = Eigen::Index{1} << electron_count;
  ComplexMatrix sx = ComplexMatrix::Zero(dim, dim);
  ComplexMatrix sy = ComplexMatrix::Zero(dim, dim);
  for (int k = 0; k < electron_count; ++k) {
    sx += 0.5 * spin_operator(pauli_x(), k, electron_count);
    sy += 0.5 * spin_operator(pauli_y(), k, electron_count);
  }
  const ComplexMatrix sz = total_sz(electron_count);
  return sx * sx + sy * sy + sz * sz;
}

ComplexMatrix build_ss_hamiltonian(double delta_omega_z, double omega_x, double omega_y) {
  const double half_hbar = 0.5 * units::kHbar;
  return half_hbar * (delta_omega_z * pauli_z() + omega_x * pauli_x() + omega_y * pauli_y());
}

ComplexMatrix build_ss_hamiltonian(const SSParams& params, double omega_x, double omega_y) {
  return build_ss_hamiltonian(params.delta_omega_z(), omega_x, omega_y);
}

ComplexMatrix build_st_full(double delta_ez, double j) {
  const ComplexMatrix zeeman =
      spin_operator(pauli_z(), 0, 2) - spin_operator(pauli_z(), 1, 2);
  return 0.5 * delta_ez * zeeman + 0.25 * j * exchange_operator(0, 1, 2);
}

ComplexMatrix build_hy_full(double ez, double j, double j1, double j2) {
  const ComplexMatrix zeeman = spin_operator(pauli_z(), 0, 3) + spin_operator(pauli_z(), 1, 3) +
                               spin_operator(pauli_z(), 2, 3);
  return 0.5 * ez * zeeman + 0.25 * j * exchange_operator(0, 1, 3) +
         0.25 * j1 * exchange_operator(0, 2, 3) + 0.25 * j2 * exchange_operator(1, 2, 3);
}

LogicalBasis st_logical_basis() {
  const StateVector ud = kron(StateVector(up()), StateVector(down()));
  const StateVector du = kron(StateVector(down()), StateVector(up()));
  const double r = 1.0 / std::sqrt(2.0);
  return LogicalBasis{r * (ud - du), r * (ud + du)};
}

LogicalBasis hy_logical_basis() {
  const LogicalBasis pair = st_logical_basis();  // |S>, |T0> of electrons 1, 2
  const StateVector t_plus = kron(StateVector(up()), StateVector(up()));
  const StateVector zero = kron(pair.zero, StateVector(up()));
  const StateVector one = std::sqrt(1.0 / 3.0) * kron(pair.one, StateVector(up())) -
                          std::sqrt(2.0 / 3.0) * kron(t_plus, StateVector(down()));
  return LogicalBasis{zero, one};
}

Matrix2 project_to_logical(const ComplexMatrix& h_full, const LogicalBasis& basis) {
  if (h_full.rows() != basis.full_dimension() || h_full.cols() != basis.full_dimension()) {
    throw std::invalid_argument("project_to_logical: dimension mismatch");
  }
  const ComplexMatrix b = basis.isometry();
  return b.adjoint() * h_full * b;
}

double leakage_check(const ComplexMatrix& h_full, const LogicalBasis& basis,
                     const StateVector& psi0, std::span<const double> t_grid) {
  const StateVector start = psi0.size() == 2 ? basis.embed(psi0) : psi0;
  if (start.size() != h_full.rows()) throw std::invalid_argument("leakage_check: dimension mismatch");
  const ComplexMatrix b = basis.isometry();
  double worst = 0.0;
  for (double t : t_grid) {
    const StateVector psi = expm_hermitian(h_full, t) * start;
    const double inside = (b.adjoint() * psi).squaredNorm();
    worst = std::max(worst, 1.0 - inside);
  }
  return worst;
}

QubitModel::QubitModel(QubitKind kind,
                       std::variant<std::monostate, SSParams, STParams, HYParams> params,
                       std::vector<ChannelInfo> channels, LogicalBasis basis)
    : kind_(kind), params_(std::move(params)), channels_(std::move(channels)), basis_(std::move(basis)) {}

QubitModel QubitModel::single_spin(const SSParams& p) {
  p.validate();
  LogicalBasis basis{StateVector(up()), StateVector(down())};
  return QubitModel(QubitKind::ss, p,
                    {{"omega_x", true}, {"omega_y", true}, {"delta_omega_z", false}}, basis);
}

QubitModel QubitModel::singlet_triplet(const STParams& p) {
  p.validate();
  return QubitModel(QubitKind::st, p, {{"delta_ez", false}, {"j", true}}, st_logical_basis());
}

QubitModel QubitModel::hybrid(const HYParams& p) {
  p.validate();
  return QubitModel(QubitKind::hy, p, {{"j", false}, {"j1", true}, {"j2", true}},
                    hy_logical_basis());
}

QubitModel QubitModel::no_operation() {
  LogicalBasis basis{StateVector(up()), StateVector(down())};
  return QubitModel(QubitKind::noop, std::monostate{}, {}, basis);
}

std::size_t QubitModel::channel_index(std::string_view name) const {
  for (std::size_t k = 0; k < channels_.size(); ++k) {
    if (channels_[k].name == name) return k;
  }
  throw std::invalid_argument("unknown channel '" + std::string(name) + "' for qubit " +
                              std::string(to_string(kind_)));
}

std::vector<double> QubitModel::static_values() const {
  switch (kind_) {
    case QubitKind::ss: return {0.0, 0.0, ss().delta_omega_z()};
    case QubitKind::st: return {st().delta_ez, 0.0};
    case QubitKind::hy: return {hy().j, 0.0, 0.0};
    case QubitKind::noop: return {};
  }
  return {};
}

void QubitModel::check_channels(std::span<const double> values) const {
  if (values.size() != channels_.size()) {
    throw std::invalid_argument("channel count mismatch for qubit " + std::string(to_string(kind_)));
  }
}

PauliVector QubitModel::logical_hamiltonian(std::span<const double> v) const {
  check_channels(v);
  switch (kind_) {
    case QubitKind::ss: {
      const double half_hbar = 0.5 * units::kHbar;
      return PauliVector{0.0, half_hbar * v[0], half_hbar * v[1], half_hbar * v[2]};
    }
    case QubitKind::st: {
      // <S|H|S> = -3J/4, <T0|H|T0> = J/4, <S|H|T0> = dEz
      const double dez = v[0];
      const double j = v[1];
      return PauliVector{-0.25 * j, dez, 0.0, -0.5 * j};
    }
    case QubitKind::hy: {
      // <0|H|0> = Ez/2 - 3J/4, <1|H|1> = Ez/2 + J/4 - (J1+J2)/2,
      // <0|H|1> = sqrt(3)/4 (J1 - J2)
      const double ez = hy().ez;
      const double j = v[0];
      const double j1 = v[1];
      const double j2 = v[2];
      const double h00 = 0.5 * ez - 0.75 * j;
      const double h11 = 0.5 * ez + 0.25 * j - 0.5 * (j1 + j2);
      return PauliVector{0.5 * (h00 + h11), 0.25 * kSqrt3 * (j1 - j2), 0.0, 0.5 * (h00 - h11)};
    }
    case QubitKind::noop:
      return PauliVector{};
  }
  return PauliVector{};
}

ComplexMatrix QubitModel::full_hamiltonian(std::span<const double> v) const {
  check_channels(v);
  switch (kind_) {
    case QubitKind::ss: return build_ss_hamiltonian(v[2], v[0], v[1]);
    case QubitKind::st: return build_st_full(v[0], v[1]);
    case QubitKind::hy: return build_hy_full(hy().ez, v[0], v[1], v[2]);
    case QubitKind::noop: return ComplexMatrix::Zero(2, 2);
  }
  return ComplexMatrix::Zero(2, 2);
}

}  // namespace spinsim
