#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spinsim/evolution.hpp"

namespace spinsim {

struct SweepSpec {
  std::vector<QubitKind> qubits{QubitKind::ss, QubitKind::st, QubitKind::hy};
  std::vector<GateKind> gates{GateKind::rx, GateKind::rz};
  std::vector<double> thetas;
  std::vector<double> taus;  // ns
  std::vector<bool> noise_settings{false};
  std::size_t trials = 1000;
  std::uint64_t seed = 12345;
  ControlMode mode = ControlMode::table_literal;
  /// Overrides the context's HY Zeeman energy (ueV) when set.
  std::optional<double> hy_ez;
  std::size_t workers = 1;

  void validate() const;
  std::size_t row_count() const;
};

struct SweepRow {
  QubitKind qubit = QubitKind::ss;
  GateKind gate = GateKind::rx;
  double theta = 0.0;
  double tau = 0.0;
  bool noise = false;
  std::size_t trials = 1;
  std::uint64_t seed = 0;
  ControlMode mode = ControlMode::table_literal;
  double fidelity_mean = 0.0;
  double fidelity_stderr = 0.0;

  double infidelity() const { return 1.0 - fidelity_mean; }
};

struct SweepResult {
  std::vector<SweepRow> rows;

  /// Rows of one curve, ordered by tau.
  std::vector<SweepRow> tau_series(QubitKind qubit, GateKind gate, bool noise, double theta) const;
  /// Rows of one curve, ordered by theta.
  std::vector<SweepRow> theta_series(QubitKind qubit, GateKind gate, bool noise, double tau) const;
};

/// k * theta_max / n for k = 1..n.
std::vector<double> uniform_theta_grid(std::size_t n = 32, double theta_max = 3.141592653589793);
/// n log-spaced points on [lo, hi], endpoints exact.
std::vector<double> log_tau_grid(double lo, double hi, std::size_t n);

/// Called once per row, in grid order, as soon as every earlier row is done.
using RowSink = std::function<void(const SweepRow&)>;

/// Evaluates every grid point (order: qubit, gate, noise, theta, tau). Rows in
/// `previous` with a matching key are reused rather than recomputed.
SweepResult run_sweep(const SimulationContext& ctx, const SweepSpec& spec,
                      const SweepResult* previous = nullptr, const RowSink& sink = {});

/// theta x tau map; noise off unless `noisy`.
SweepResult heatmap_theta_tau(const SimulationContext& ctx, SweepSpec spec, bool noisy = false,
                              const SweepResult* previous = nullptr, const RowSink& sink = {});
/// Disturbed and undisturbed rows at one tau.
SweepResult linecut_theta(const SimulationContext& ctx, SweepSpec spec, double tau = 0.1,
                          const SweepResult* previous = nullptr, const RowSink& sink = {});
/// SS, ST, HY and No-Operation curves against tau for one gate and theta.
SweepResult tau_compare(const SimulationContext& ctx, SweepSpec spec, GateKind gate,
                        double theta = 3.141592653589793 / 2.0,
                        const SweepResult* previous = nullptr, const RowSink& sink = {});

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const SweepRow& row);
void write_csv(std::ostream& out, const SweepResult& result);
/// Reads rows back; a truncated final line (interrupted write) is dropped.
SweepResult read_csv(std::istream& in);

enum class PlotKind { heatmap, lines };

/// Deterministic SVG: log tau axis, log infidelity scale.
std::string render_svg(const SweepResult& result, PlotKind kind);
void write_svg(const std::filesystem::path& path, const SweepResult& result, PlotKind kind);

// Checks of the qualitative claims. Each reports what it measured.

struct CheckOutcome {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// 1-F nondecreasing in tau at every theta (noise off).
CheckOutcome check_monotonic_tau(const SweepResult& r, QubitKind q, GateKind g, double tol = 1e-9);
/// 1-F below `bound` at the smallest tau for every noise-free curve.
CheckOutcome check_small_tau_limit(const SweepResult& r, double bound = 1e-4);
/// HY R_x(pi): some tau > 1 ns has lower 1-F than tau = 1 ns.
CheckOutcome check_hy_rx_reduction(const SweepResult& r);
/// HY R_z: a strict interior local minimum of 1-F in tau within [lo, hi] at some theta.
CheckOutcome check_hy_rz_local_minimum(const SweepResult& r, double lo = 0.1, double hi = 1.0);
/// HY R_z at the largest tau stays at least `margin` away from the no-op infidelity sin^2(theta/2).
CheckOutcome check_hy_rz_no_saturation(const SweepResult& r, double margin = 0.05);
/// Disturbed 1-F exceeds undisturbed by more than `k` standard errors at every theta.
CheckOutcome check_noise_gap(const SweepResult& r, QubitKind q, GateKind g, double k = 2.0);
/// Spearman correlation of disturbed SS R_x infidelity with theta above `min_rho`.
CheckOutcome check_ss_rx_theta_trend(const SweepResult& r, double min_rho = 0.9);
/// Least-squares slope of disturbed ST R_z infidelity vs theta within `k` standard errors of 0.
CheckOutcome check_st_rz_flat(const SweepResult& r, double k = 2.0);
/// HY R_x has the smallest mean log10(disturbed / undisturbed infidelity).
CheckOutcome check_hy_rx_smallest_gap(const SweepResult& r);
/// Every disturbed fidelity lies in [lo, hi].
CheckOutcome check_disturbed_range(const SweepResult& r, double lo = 0.90, double hi = 0.9999);
/// No-Operation fidelity equals 0.5 at every row.
CheckOutcome check_noop_half(const SweepResult& r, double tol = 1e-12);
/// SS 1-F below ST and HY at every tau in [lo, hi].
CheckOutcome check_ss_lowest(const SweepResult& r, GateKind g, bool noise, double lo, double hi);
/// Relative change of 1-F below `max_change` per decade over the two smallest decades.
CheckOutcome check_plateau(const SweepResult& r, QubitKind q, GateKind g, bool noise,
                           double max_change = 0.05);
/// 1-F at the largest tau within `rel` of the No-Operation value.
CheckOutcome check_noop_approach(const SweepResult& r, QubitKind q, GateKind g, double rel = 0.10);

/// Runs every check the content of `r` supports.
std::vector<CheckOutcome> verify(const SweepResult& r);

}  // namespace spinsim
