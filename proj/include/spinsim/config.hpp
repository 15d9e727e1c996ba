#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "spinsim/evolution.hpp"

namespace spinsim {

/// Parsed run configuration. Physical quantities are stored in the units the
/// key names carry; conversion to internal units happens in make_context().
struct RunConfig {
  // [ss]
  double ss_omega_over_2pi_hz = 1e6;
  double ss_delta_omega_z_over_2pi_hz = 0.0;
  double ss_sigma_omega_over_2pi_hz = 0.05e6;
  double ss_sigma_delta_omega_z_over_2pi_hz = 20.0;
  // [st]
  double st_j_nev = 700.0;
  double st_delta_ez_nev = 32.0;
  double st_sigma_j_nev = 1.0;
  double st_sigma_delta_ez_nev = 4.0;
  // [hy]
  double hy_jmax_uev = 1.0;
  double hy_j_uev = 0.5;
  double hy_ez_uev = 10.0;  // required key in files
  double hy_sigma_j_nev = 80.0;
  std::vector<double> hy_ez_scan_uev{0.13, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0};
  // [simulation]
  double t_min_ps = 100.0;
  std::size_t trials = 1000;
  std::uint64_t master_seed = 12345;
  double dt_divisor = 20.0;
  ControlMode mode = ControlMode::table_literal;
  bool noise_when_off = true;
  double tail_ns = 0.0;
  double convergence_tol = 1e-8;
  int max_refinements = 6;
  // [sweep]
  std::size_t theta_points = 32;
  double theta_max_over_pi = 1.0;
  std::size_t tau_points = 40;
  double tau_min_ns = 1e-3;
  double tau_max_ns = 100.0;
  double linecut_tau_ns = 0.1;
  std::size_t compare_tau_points = 33;
  double compare_tau_min_ns = 1e-3;
  double compare_tau_max_ns = 1e5;
  double compare_theta_over_pi = 0.5;

  void validate() const;
};

/// Built-in configuration with the figure-caption parameters.
RunConfig default_config();

/// Grammar: `[section]` headers, `key = value` lines, `#` or `;` comments.
/// Errors are ConfigError naming the source, line and key.
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

/// Writes a file that parse_config() reads back to the same configuration.
void write_config(std::ostream& out, const RunConfig& config);

/// Models, noise specs, evolution options and calibrated signs.
SimulationContext make_context(const RunConfig& config);

std::vector<double> theta_grid(const RunConfig& config);
std::vector<double> tau_grid(const RunConfig& config);
std::vector<double> compare_tau_grid(const RunConfig& config);

}  // namespace spinsim
