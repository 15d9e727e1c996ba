#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "spinsim/noise.hpp"
#include "spinsim/pulse_synth.hpp"

namespace spinsim {

/// Where the state is propagated. `logical` uses the closed-form 2x2
/// projected Hamiltonian; `full` propagates in the 4- or 8-dimensional spin
/// space and projects at the end (verification oracle).
enum class EvolutionSpace { logical, full };

struct EvolutionOptions {
  EvolutionSpace space = EvolutionSpace::logical;
  DtPolicy dt;
  /// Accept a grid once halving dt moves the final state by less than this
  /// trace distance (which bounds the change of any fidelity).
  double convergence_tol = 1e-8;
  int max_refinements = 6;
};

struct EvolutionResult {
  DensityMatrix final_state;  // logical 2x2
  double total_time = 0.0;
  std::size_t step_count = 0;
  double max_unitarity_defect = 0.0;
  /// 1 - Tr(P rho P) at the end; zero in the logical space.
  double leakage = 0.0;
  double dt = 0.0;
  int refinements = 0;
  /// Trace distance between the last two grids.
  double residual = 0.0;
};

/// Square-edged evolution: one exact exponential per step.
EvolutionResult evolve_ideal(const QubitModel& model, const PiecewiseConstantSignal& signal,
                             const StateVector& psi0, EvolutionSpace space = EvolutionSpace::logical);

/// Evolution on the filter grid of `signal` only (no refinement). Each grid
/// interval is propagated by a fourth-order Magnus step whose first term uses
/// the exact interval mean of the filtered channels.
EvolutionResult evolve_on_grid(const QubitModel& model, const SampledSignal& signal,
                               const StateVector& psi0, EvolutionSpace space);

/// evolve_on_grid with dt halving until the convergence gate passes.
/// Throws ConvergenceError when the cap is reached first.
EvolutionResult evolve_sampled(const QubitModel& model, const SampledSignal& signal,
                               const StateVector& psi0, const EvolutionOptions& options = {});

struct FidelityStats {
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t trials = 0;
  std::vector<double> per_trial;  // filled only when retention is requested

  double infidelity() const { return 1.0 - mean; }
};

/// Sum with a fixed pairwise reduction tree (order-independent of scheduling).
double pairwise_sum(std::span<const double> values);
FidelityStats summarize(std::span<const double> fidelities, bool retain = false);

/// Runs fn(i) for i in [0, n) on `workers` threads. Result placement is the
/// caller's business; fn must be safe to call concurrently.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn);
/// --workers / SPINSIM_WORKERS / hardware concurrency, in that order.
std::size_t resolve_workers(std::optional<std::size_t> requested);

/// Everything a gate run needs that does not change across a sweep.
struct SimulationContext {
  QubitModel ss = QubitModel::single_spin({});
  QubitModel st = QubitModel::singlet_triplet({});
  QubitModel hy = QubitModel::hybrid({});
  QubitModel noop = QubitModel::no_operation();
  NoiseSpec ss_noise;
  NoiseSpec st_noise;
  NoiseSpec hy_noise;
  SignTable signs;
  double t_min = 0.1;  // ns
  double tail = 0.0;   // ns
  EvolutionOptions evolution;

  const QubitModel& model(QubitKind kind) const;
  const NoiseSpec& noise(QubitKind kind) const;
};

struct GateRun {
  QubitKind qubit = QubitKind::ss;
  GateKind gate = GateKind::rx;
  double theta = units::kPi / 2.0;
  double tau = 0.1;  // ns
  ControlMode mode = ControlMode::physical;
  bool noise = false;
  std::size_t trials = 1000;
  std::uint64_t seed = 1;
  bool retain_trials = false;
  std::size_t workers = 1;
};

/// Ideal target state R(theta) psi0 with the calibrated sign.
StateVector target_state(const SimulationContext& ctx, QubitKind qubit, GateKind gate, double theta);

/// Full pipeline for one (qubit, gate, theta, tau) point: synthesize, perturb
/// per trial, filter, evolve, and compare against the target rotation.
FidelityStats run_gate(const SimulationContext& ctx, const GateRun& run);

/// Shortest-step-relative tau used for the filter-free limit.
double filter_free_tau(const SimulationContext& ctx, QubitKind qubit, GateKind gate, double theta,
                       ControlMode mode);

}  // namespace spinsim
