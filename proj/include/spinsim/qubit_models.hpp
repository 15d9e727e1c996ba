#pragma once

#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "spinsim/quantum_core.hpp"

namespace spinsim {

enum class QubitKind { ss, st, hy, noop };

std::string_view to_string(QubitKind kind);
QubitKind parse_qubit_kind(std::string_view name);

/// Single-spin qubit in the rotating frame. Frequencies are cyclic (Hz) as
/// they are quoted; the model works with angular frequencies in rad/ns.
struct SSParams {
  double omega_over_2pi_hz = 1e6;
  double delta_omega_z_over_2pi_hz = 0.0;

  double omega() const;          // rad/ns
  double delta_omega_z() const;  // rad/ns
  void validate() const;
};

/// Singlet-triplet qubit. Energies in ueV.
struct STParams {
  double j = 0.7;
  double delta_ez = 0.032;

  void validate() const;
};

/// Hybrid qubit. Energies in ueV. `j` is the always-on exchange between the
/// two electrons of the doubly occupied dot; J1 and J2 are pulsed up to jmax.
struct HYParams {
  double ez = 10.0;
  double j = 0.5;
  double jmax = 1.0;

  /// Timing constants of the analytical sequences.
  double c() const { return ez + 0.75 * jmax; }
  double a() const { return 0.5 * ez + 0.125 * jmax; }
  double b() const { return -ez + 0.25 * jmax; }
  void validate() const;
};

/// Two orthonormal full-space vectors spanning the logical subspace.
struct LogicalBasis {
  StateVector zero;
  StateVector one;

  Eigen::Index full_dimension() const { return zero.size(); }
  /// Columns are |0>, |1>.
  ComplexMatrix isometry() const;
  StateVector embed(const StateVector& logical) const;
  bool is_orthonormal(double tol = 1e-12) const;
};

struct ChannelInfo {
  std::string name;
  /// Pulsed channels idle at zero; static channels idle at their bias value.
  bool pulsed = true;
};

// Single-spin operators in the {|up>, |down>} basis, tensor order = electron
// index ascending (electron 1 is the most significant factor).
ComplexMatrix spin_operator(const Matrix2& pauli, int electron, int electron_count);
/// sigma_a . sigma_b on an n-electron product space.
ComplexMatrix exchange_operator(int a, int b, int electron_count);
/// Total S^z and S^2 (hbar = 1) on an n-electron product space.
ComplexMatrix total_sz(int electron_count);
ComplexMatrix total_s_squared(int electron_count);

/// Drive Hamiltonian (hbar/2)(dwz sz + wx sx + wy sy), 2x2.
ComplexMatrix build_ss_hamiltonian(const SSParams& params, double omega_x, double omega_y);
ComplexMatrix build_ss_hamiltonian(double delta_omega_z, double omega_x, double omega_y);
/// 1/2 dEz (s1z - s2z) + 1/4 J s1.s2 on {uu, ud, du, dd}.
ComplexMatrix build_st_full(double delta_ez, double j);
/// 1/2 Ez (s1z+s2z+s3z) + 1/4 J s1.s2 + 1/4 J1 s1.s3 + 1/4 J2 s2.s3.
ComplexMatrix build_hy_full(double ez, double j, double j1, double j2);

LogicalBasis st_logical_basis();
LogicalBasis hy_logical_basis();

/// [[<0|H|0>, <0|H|1>], [<1|H|0>, <1|H|1>]]
Matrix2 project_to_logical(const ComplexMatrix& h_full, const LogicalBasis& basis);

/// max over the grid of 1 - ||P psi(t)||^2 for psi(0) = basis-embedded logical
/// state `psi0` and constant Hamiltonian `h_full`.
double leakage_check(const ComplexMatrix& h_full, const LogicalBasis& basis,
                     const StateVector& psi0, std::span<const double> t_grid);

/// A qubit type with its static parameters. Converts instantaneous control
/// channel values into logical (2x2) or full-space Hamiltonians.
class QubitModel {
 public:
  static QubitModel single_spin(const SSParams& p);
  static QubitModel singlet_triplet(const STParams& p);
  static QubitModel hybrid(const HYParams& p);
  static QubitModel no_operation();

  QubitKind kind() const { return kind_; }
  const std::vector<ChannelInfo>& channels() const { return channels_; }
  std::size_t channel_index(std::string_view name) const;
  /// Bias value of each channel when nothing is pulsed.
  std::vector<double> static_values() const;

  /// Closed-form projected Hamiltonian (identity part kept).
  PauliVector logical_hamiltonian(std::span<const double> channel_values) const;
  ComplexMatrix full_hamiltonian(std::span<const double> channel_values) const;
  const LogicalBasis& basis() const { return basis_; }
  Eigen::Index full_dimension() const { return basis_.full_dimension(); }

  const SSParams& ss() const { return std::get<SSParams>(params_); }
  const STParams& st() const { return std::get<STParams>(params_); }
  const HYParams& hy() const { return std::get<HYParams>(params_); }

 private:
  QubitModel(QubitKind kind, std::variant<std::monostate, SSParams, STParams, HYParams> params,
             std::vector<ChannelInfo> channels, LogicalBasis basis);

  void check_channels(std::span<const double> values) const;

  QubitKind kind_;
  std::variant<std::monostate, SSParams, STParams, HYParams> params_;
  std::vector<ChannelInfo> channels_;
  LogicalBasis basis_;
};

}  // namespace spinsim
