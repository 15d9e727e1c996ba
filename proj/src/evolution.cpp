#include "spinsim/evolution.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
// Gauss-Legendre nodes on [0, 1].
constexpr double kGaussLo = 0.5 - kSqrt3 / 6.0;
constexpr double kGaussHi = 0.5 + kSqrt3 / 6.0;

StateVector require_logical_state(const StateVector& psi0) {
  if (psi0.size() != 2) throw std::invalid_argument("initial state must be a logical 2-vector");
  const double n = psi0.norm();
  if (std::abs(n - 1.0) > 1e-12) throw std::invalid_argument("initial state must be normalized");
  return psi0;
}

// Propagates either a 2x2 logical state or a full-space state, tracking the
// accumulated propagator so its unitarity can be audited.
class Propagator {
 public:
  Propagator(const QubitModel& model, EvolutionSpace space)
      : model_(model), space_(space) {
    if (space_ == EvolutionSpace::full) {
      full_ = ComplexMatrix::Identity(model.full_dimension(), model.full_dimension());
    }
  }

  void apply_constant(std::span<const double> values, double h) {
    if (space_ == EvolutionSpace::logical) {
      logical_ = pauli_expm(model_.logical_hamiltonian(values), h) * logical_;
    } else {
      full_ = expm_hermitian(model_.full_hamiltonian(values), h) * full_;
    }
    ++steps_;
  }

  // Fourth-order Magnus step: exact mean for the first term, Gauss-point
  // commutator for the second.
  void apply_magnus(std::span<const double> mean, std::span<const double> early,
                    std::span<const double> late, double h) {
    const double scale = h / units::kHbar;
    if (space_ == EvolutionSpace::logical) {
      PauliVector avg = model_.logical_hamiltonian(mean);
      const PauliVector a = model_.logical_hamiltonian(early);
      const PauliVector b = model_.logical_hamiltonian(late);
      // i (sqrt3/12)(h/hbar)[a.s, b.s] = -(sqrt3/6)(h/hbar)(a x b).s
      const double k = -(kSqrt3 / 6.0) * scale;
      avg.ax += k * (a.ay * b.az - a.az * b.ay);
      avg.ay += k * (a.az * b.ax - a.ax * b.az);
      avg.az += k * (a.ax * b.ay - a.ay * b.ax);
      logical_ = pauli_expm(avg, h) * logical_;
    } else {
      const ComplexMatrix a = model_.full_hamiltonian(early);
      const ComplexMatrix b = model_.full_hamiltonian(late);
      ComplexMatrix eff = model_.full_hamiltonian(mean) +
                          Complex(0.0, kSqrt3 / 12.0 * scale) * (a * b - b * a);
      eff = 0.5 * (eff + eff.adjoint()).eval();
      full_ = expm_hermitian(eff, h) * full_;
    }
    ++steps_;
  }

  void audit() {
    const double d = space_ == EvolutionSpace::logical ? unitarity_defect(ComplexMatrix(logical_))
                                                       : unitarity_defect(full_);
    max_defect_ = std::max(max_defect_, d);
  }

  EvolutionResult finish(const StateVector& psi0, double total_time) {
    audit();
    const LogicalBasis& basis = model_.basis();
    if (space_ == EvolutionSpace::logical) {
      const StateVector psi = logical_ * psi0;
      return EvolutionResult{DensityMatrix::from_pure(psi), total_time, steps_, max_defect_, 0.0};
    }
    const StateVector psi = full_ * basis.embed(psi0);
    const StateVector inside = basis.isometry().adjoint() * psi;
    const double kept = inside.squaredNorm();
    ComplexMatrix rho = inside * inside.adjoint();
    rho = 0.5 * (rho + rho.adjoint()).eval();
    return EvolutionResult{DensityMatrix(std::move(rho)), total_time, steps_, max_defect_,
                           std::max(0.0, 1.0 - kept)};
  }

 private:
  const QubitModel& model_;
  EvolutionSpace space_;
  Matrix2 logical_ = Matrix2::Identity();
  ComplexMatrix full_;
  std::size_t steps_ = 0;
  double max_defect_ = 0.0;
};

}  // namespace

EvolutionResult evolve_ideal(const QubitModel& model, const PiecewiseConstantSignal& signal,
                             const StateVector& psi0, EvolutionSpace space) {
  const StateVector start = require_logical_state(psi0);
  Propagator prop(model, space);
  if (signal.values.empty()) return prop.finish(start, 0.0);
  signal.validate();
  if (signal.channel_count() != model.channels().size()) {
    throw std::invalid_argument("evolve_ideal: signal channels do not match the model");
  }
  for (std::size_t k = 0; k < signal.step_count(); ++k) {
    prop.apply_constant(signal.values[k], signal.step_duration(k));
    prop.audit();
  }
  return prop.finish(start, signal.duration());
}

EvolutionResult evolve_on_grid(const QubitModel& model, const SampledSignal& signal,
                               const StateVector& psi0, EvolutionSpace space) {
  const StateVector start = require_logical_state(psi0);
  const std::size_t nch = signal.source.channel_count();
  if (nch != model.channels().size()) {
    throw std::invalid_argument("evolve_sampled: signal channels do not match the model");
  }
  Propagator prop(model, space);
  std::vector<double> mean(nch), early(nch), late(nch);
  // Uniform sub-grids repeat the same interval length; reuse its decay factors.
  double last_h = -1.0;
  double w_mean = 0.0, w_early = 0.0, w_late = 0.0;
  for (std::size_t i = 0; i < signal.interval_count(); ++i) {
    const double h = signal.times[i + 1] - signal.times[i];
    if (h != last_h) {
      const double x = h / signal.tau;
      w_mean = -std::expm1(-x) / x;
      w_early = std::exp(-kGaussLo * x);
      w_late = std::exp(-kGaussHi * x);
      last_h = h;
    }
    const auto& y0 = signal.samples[i];
    const auto& u = signal.source.values[signal.interval_step[i]];
    for (std::size_t c = 0; c < nch; ++c) {
      const double r = y0[c] - u[c];
      mean[c] = u[c] + r * w_mean;
      early[c] = u[c] + r * w_early;
      late[c] = u[c] + r * w_late;
    }
    prop.apply_magnus(mean, early, late, h);
    if (i + 1 == signal.interval_count() || signal.interval_step[i + 1] != signal.interval_step[i]) {
      prop.audit();
    }
  }
  EvolutionResult r = prop.finish(start, signal.times.back());
  r.dt = signal.dt;
  return r;
}

EvolutionResult evolve_sampled(const QubitModel& model, const SampledSignal& signal,
                               const StateVector& psi0, const EvolutionOptions& options) {
  EvolutionResult coarse = evolve_on_grid(model, signal, psi0, options.space);
  double divisor = signal.policy.divisor;
  double residual = 0.0;
  for (int r = 1; r <= options.max_refinements; ++r) {
    divisor *= 2.0;
    EvolutionResult fine = evolve_on_grid(model, signal.resampled(divisor), psi0, options.space);
    residual = trace_distance(coarse.final_state, fine.final_state);
    fine.max_unitarity_defect = std::max(fine.max_unitarity_defect, coarse.max_unitarity_defect);
    if (residual < options.convergence_tol) {
      fine.refinements = r;
      fine.residual = residual;
      return fine;
    }
    coarse = std::move(fine);
  }
  throw ConvergenceError("time-step refinement did not converge after " +
                             std::to_string(options.max_refinements) +
                             " halvings (residual " + std::to_string(residual) + ")",
                         residual);
}

double pairwise_sum(std::span<const double> values) {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

FidelityStats summarize(std::span<const double> fidelities, bool retain) {
  if (fidelities.empty()) throw std::invalid_argument("summarize: no trials");
  FidelityStats s;
  s.trials = fidelities.size();
  const double n = static_cast<double>(s.trials);
  s.mean = pairwise_sum(fidelities) / n;
  if (s.trials > 1) {
    std::vector<double> sq(fidelities.size());
    for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = (fidelities[i] - s.mean) * (fidelities[i] - s.mean);
    const double var = pairwise_sum(sq) / (n - 1.0);
    s.standard_error = std::sqrt(var / n);
  }
  s.mean = std::clamp(s.mean, 0.0, 1.0);
  if (retain) s.per_trial.assign(fidelities.begin(), fidelities.end());
  return s;
}

void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, n));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::size_t resolve_workers(std::optional<std::size_t> requested) {
  if (requested && *requested > 0) return *requested;
  if (const char* env = std::getenv("SPINSIM_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

const QubitModel& SimulationContext::model(QubitKind kind) const {
  switch (kind) {
    case QubitKind::ss: return ss;
    case QubitKind::st: return st;
    case QubitKind::hy: return hy;
    case QubitKind::noop: return noop;
  }
  return noop;
}

const NoiseSpec& SimulationContext::noise(QubitKind kind) const {
  static const NoiseSpec none;
  switch (kind) {
    case QubitKind::ss: return ss_noise;
    case QubitKind::st: return st_noise;
    case QubitKind::hy: return hy_noise;
    case QubitKind::noop: return none;
  }
  return none;
}

StateVector target_state(const SimulationContext& ctx, QubitKind qubit, GateKind gate, double theta) {
  return target_unitary(gate, theta, ctx.signs.sign(qubit, gate)) * default_initial_state();
}

double filter_free_tau(const SimulationContext& ctx, QubitKind qubit, GateKind gate, double theta,
                       ControlMode mode) {
  const GateSequence seq = synthesize(ctx.model(qubit), gate, theta, SynthesisOptions{ctx.t_min, mode});
  return 1e-6 * seq.shortest_step();
}

FidelityStats run_gate(const SimulationContext& ctx, const GateRun& run) {
  if (run.trials == 0) throw std::invalid_argument("run_gate: trials must be >= 1");
  const QubitModel& model = ctx.model(run.qubit);
  const GateSequence seq = synthesize(model, run.gate, run.theta, SynthesisOptions{ctx.t_min, run.mode});
  const PiecewiseConstantSignal ideal = to_piecewise(model, seq, seq.idle, ctx.tail);
  const StateVector psi0 = default_initial_state();
  const StateVector target = target_state(ctx, run.qubit, run.gate, run.theta);

  // No-Operation has no target to reach; its fidelity is the baseline.
  if (run.mode == ControlMode::table_literal && run.qubit != QubitKind::noop) {
    const PiecewiseConstantSignal square = to_piecewise(model, seq, seq.idle);
    const double f = pure_state_fidelity(target, evolve_ideal(model, square, psi0).final_state);
    if (f < 1.0 - 1e-9) {
      throw ValidationError("ideal " + std::string(to_string(run.qubit)) + " " +
                            std::string(to_string(run.gate)) +
                            " sequence misses its target rotation (F = " + std::to_string(f) + ")");
    }
  }

  const NoiseSpec& spec = ctx.noise(run.qubit);
  const bool noisy = run.noise && !spec.is_zero();
  const std::size_t trials = noisy ? run.trials : 1;
  const std::uint64_t point = point_key(run.qubit, run.gate, run.theta);

  std::vector<double> fidelities(trials);
  parallel_for(trials, run.workers, [&](std::size_t i) {
    PiecewiseConstantSignal signal = ideal;
    if (noisy) {
      const auto offsets = draw_offsets(spec, TrialSeed{run.seed, i, point});
      signal = perturb(ideal, offsets, spec.noise_when_off);
    }
    const SampledSignal sampled = apply_lowpass(signal, run.tau, ctx.evolution.dt);
    const EvolutionResult r = evolve_sampled(model, sampled, psi0, ctx.evolution);
    fidelities[i] = pure_state_fidelity(target, r.final_state);
  });
  return summarize(fidelities, run.retain_trials);
}

}  // namespace spinsim
