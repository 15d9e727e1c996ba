#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "spinsim/config.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/evolution.hpp"

using namespace spinsim;

namespace {

const SimulationContext& context() {
  static const SimulationContext ctx = make_context(default_config());
  return ctx;
}

PiecewiseConstantSignal square(const QubitModel& m, GateKind g, double theta, ControlMode mode) {
  const GateSequence s = synthesize(m, g, theta, SynthesisOptions{0.1, mode});
  return to_piecewise(m, s, s.idle);
}

// RK4 through each grid interval on the exact RC waveform, in the full space.
oracle::V rk4_reference(const QubitModel& m, const SampledSignal& s, int substeps) {
  oracle::V psi = m.basis().embed(default_initial_state());
  const std::size_t nch = s.source.channel_count();
  for (std::size_t i = 0; i < s.interval_count(); ++i) {
    const double t0 = s.times[i];
    auto h = [&](double t) {
      std::vector<double> v(nch);
      for (std::size_t c = 0; c < nch; ++c) v[c] = s.value_at(i, c, t - t0);
      return oracle::M(m.full_hamiltonian(v));
    };
    psi = oracle::rk4(h, psi, t0, s.times[i + 1], substeps);
  }
  return psi;
}

double fidelity_to(const StateVector& target, const EvolutionResult& r) {
  return pure_state_fidelity(target, r.final_state);
}

}  // namespace

TEST(EvolveIdeal, EmptySignalKeepsState) {
  PiecewiseConstantSignal empty;
  const auto& m = context().ss;
  for (const auto& ch : m.channels()) empty.channel_names.push_back(ch.name);
  empty.idle = m.static_values();
  const EvolutionResult r = evolve_ideal(m, empty, default_initial_state());
  EXPECT_NEAR(pure_state_fidelity(default_initial_state(), r.final_state), 1.0, 1e-15);
}

TEST(EvolveIdeal, HitsTargets) {
  const auto& ctx = context();
  const StateVector x = target_state(ctx, QubitKind::ss, GateKind::rx, oracle::kPi / 2);
  EXPECT_NEAR(fidelity_to(x, evolve_ideal(ctx.ss, square(ctx.ss, GateKind::rx, oracle::kPi / 2, ControlMode::table_literal),
                                          default_initial_state())),
              1.0, 1e-12);
  const StateVector z = target_state(ctx, QubitKind::st, GateKind::rz, oracle::kPi / 2);
  EXPECT_NEAR(fidelity_to(z, evolve_ideal(ctx.st, square(ctx.st, GateKind::rz, oracle::kPi / 2, ControlMode::table_literal),
                                          default_initial_state())),
              1.0, 1e-9);
}

TEST(EvolveIdeal, AgreesWithSequenceUnitary) {
  const auto& ctx = context();
  for (const QubitModel* m : {&ctx.ss, &ctx.st, &ctx.hy}) {
    for (GateKind g : {GateKind::rx, GateKind::rz}) {
      const GateSequence s = synthesize(*m, g, 2.0, SynthesisOptions{0.1, ControlMode::physical});
      const StateVector psi = sequence_unitary(*m, s) * default_initial_state();
      const EvolutionResult r = evolve_ideal(*m, to_piecewise(*m, s, s.idle), default_initial_state());
      EXPECT_NEAR(pure_state_fidelity(psi, r.final_state), 1.0, 1e-12);
    }
  }
}

TEST(EvolveSampled, MatchesRK4OnFilteredWaveform) {
  const auto& ctx = context();
  struct Case {
    const QubitModel* m;
    GateKind g;
    double tau;
  };
  for (const Case& c : {Case{&ctx.st, GateKind::rz, 2.0}, Case{&ctx.hy, GateKind::rx, 0.3},
                        Case{&ctx.hy, GateKind::rz, 0.5}}) {
    const SampledSignal s = apply_lowpass(square(*c.m, c.g, oracle::kPi / 2, ControlMode::table_literal), c.tau);
    const EvolutionResult r = evolve_sampled(*c.m, s, default_initial_state(), EvolutionOptions{EvolutionSpace::full});
    const oracle::V psi = rk4_reference(*c.m, s, 40);
    const oracle::V logical = c.m->basis().isometry().adjoint() * psi;
    EXPECT_NEAR(logical.squaredNorm(), 1.0, 1e-9);
    EXPECT_NEAR(pure_state_fidelity(logical, r.final_state), 1.0, 1e-9);
    // Logical space gives the same answer.
    const EvolutionResult l = evolve_sampled(*c.m, s, default_initial_state());
    EXPECT_LT(trace_distance(l.final_state, r.final_state), 1e-9);
  }
}

TEST(EvolveSampled, SSMatchesRK4) {
  const auto& m = context().ss;
  PiecewiseConstantSignal sig;
  sig.channel_names = {"omega_x", "omega_y", "delta_omega_z"};
  sig.boundaries = {0.0, 3.0, 5.0};
  sig.values = {{0.8, 0.0, 0.0}, {0.0, -0.5, 0.1}};
  sig.idle = {0.0, 0.0, 0.0};
  const SampledSignal s = apply_lowpass(sig, 0.7);
  const EvolutionResult r = evolve_sampled(m, s, default_initial_state());
  const oracle::V psi = rk4_reference(m, s, 40);
  EXPECT_NEAR(pure_state_fidelity(psi, r.final_state), 1.0, 1e-10);
}

TEST(EvolveSampled, ConstantSignalIsSingleExponential) {
  const auto& m = context().st;
  PiecewiseConstantSignal sig;
  sig.channel_names = {"delta_ez", "j"};
  sig.boundaries = {0.0, 37.0};
  sig.values = {{0.032, 0.7}};
  sig.idle = {0.032, 0.7};
  const ComplexMatrix u = expm_hermitian(m.full_hamiltonian(sig.values[0]), 37.0);
  const StateVector exact = m.basis().isometry().adjoint() * u * m.basis().embed(default_initial_state());
  for (double divisor : {20.0, 80.0}) {
    DtPolicy p;
    p.divisor = divisor;
    const EvolutionResult r = evolve_on_grid(m, apply_lowpass(sig, 0.05, p), default_initial_state(), EvolutionSpace::logical);
    EXPECT_NEAR(pure_state_fidelity(exact, r.final_state), 1.0, 1e-10);
  }
}

TEST(EvolveSampled, FilterFreeLimit) {
  const auto& ctx = context();
  for (const QubitModel* m : {&ctx.ss, &ctx.st, &ctx.hy}) {
    for (GateKind g : {GateKind::rx, GateKind::rz}) {
      const GateSequence s = synthesize(*m, g, oracle::kPi / 2, SynthesisOptions{0.1, ControlMode::physical});
      const auto pw = to_piecewise(*m, s, s.idle);
      const double f_ideal = pure_state_fidelity(target_state(ctx, m->kind(), g, oracle::kPi / 2),
                                                 evolve_ideal(*m, pw, default_initial_state()).final_state);
      const EvolutionResult r =
          evolve_sampled(*m, apply_lowpass(pw, 1e-6 * s.shortest_step()), default_initial_state());
      EXPECT_NEAR(pure_state_fidelity(target_state(ctx, m->kind(), g, oracle::kPi / 2), r.final_state), f_ideal,
                  1e-6);
      EXPECT_LT(r.max_unitarity_defect, 1e-10);
      EXPECT_LT(r.residual, 1e-8);
    }
  }
}

TEST(EvolveSampled, ConvergenceErrorCarriesResidual) {
  const auto& m = context().ss;
  const SampledSignal s = apply_lowpass(square(m, GateKind::rz, 1.0, ControlMode::table_literal), 5.0);
  EvolutionOptions opt;
  opt.convergence_tol = 0.0;
  opt.max_refinements = 1;
  try {
    evolve_sampled(m, s, default_initial_state(), opt);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_GE(e.residual(), 0.0);
  }
}

TEST(EvolveSampled, RejectsMismatchedChannels) {
  const auto& ctx = context();
  const auto pw = square(ctx.ss, GateKind::rx, 1.0, ControlMode::physical);
  EXPECT_THROW(evolve_ideal(ctx.st, pw, default_initial_state()), std::invalid_argument);
  EXPECT_THROW(evolve_sampled(ctx.st, apply_lowpass(pw, 0.1), default_initial_state()), std::invalid_argument);
}

TEST(RunGate, NoOperationIsOneHalf) {
  const auto& ctx = context();
  for (GateKind g : {GateKind::rx, GateKind::rz}) {
    for (double tau : {1e-3, 0.1, 10.0, 1e4}) {
      GateRun run;
      run.qubit = QubitKind::noop;
      run.gate = g;
      run.tau = tau;
      EXPECT_NEAR(run_gate(ctx, run).mean, 0.5, 1e-12);
    }
  }
}

TEST(RunGate, FilterFreeLimitAllPairs) {
  const auto& ctx = context();
  for (QubitKind q : {QubitKind::ss, QubitKind::st, QubitKind::hy}) {
    for (GateKind g : {GateKind::rx, GateKind::rz}) {
      GateRun run;
      run.qubit = q;
      run.gate = g;
      run.mode = ControlMode::table_literal;
      run.tau = filter_free_tau(ctx, q, g, run.theta, run.mode);
      EXPECT_NEAR(run_gate(ctx, run).mean, 1.0, 1e-6) << to_string(q) << ' ' << to_string(g);
    }
  }
}

TEST(RunGate, SSRxImprovesAsTauShrinks) {
  const auto& ctx = context();
  GateRun run;
  run.mode = ControlMode::table_literal;
  double previous = 1.0;
  for (double tau : {0.1, 0.07, 0.05, 0.03, 0.02, 0.01}) {
    run.tau = tau;
    const double infid = run_gate(ctx, run).infidelity();
    EXPECT_GT(infid, 0.0);
    EXPECT_LE(infid, previous + 1e-12);
    previous = infid;
  }
}

TEST(RunGate, ZeroNoiseEquivalence) {
  SimulationContext ctx = context();
  GateRun run;
  run.qubit = QubitKind::st;
  run.gate = GateKind::rz;
  run.mode = ControlMode::table_literal;
  const double clean = run_gate(ctx, run).mean;
  ctx.st_noise.sigma.assign(ctx.st_noise.sigma.size(), 0.0);
  run.noise = true;
  run.trials = 50;
  const FidelityStats s = run_gate(ctx, run);
  EXPECT_EQ(s.trials, 1u);
  EXPECT_NEAR(s.mean, clean, 1e-14);
}

TEST(RunGate, DeterministicAcrossWorkers) {
  const auto& ctx = context();
  GateRun run;
  run.qubit = QubitKind::hy;
  run.gate = GateKind::rx;
  run.mode = ControlMode::table_literal;
  run.noise = true;
  run.trials = 64;
  run.seed = 77;
  run.retain_trials = true;
  const FidelityStats one = run_gate(ctx, run);
  run.workers = 4;
  const FidelityStats four = run_gate(ctx, run);
  EXPECT_EQ(one.mean, four.mean);
  EXPECT_EQ(one.standard_error, four.standard_error);
  EXPECT_EQ(one.per_trial, four.per_trial);
  run.seed = 78;
  EXPECT_NE(run_gate(ctx, run).mean, one.mean);
}

// Infidelity is close to quadratic in the offsets, so a single 100-trial
// stderr is itself uncertain by ~20%; average over a family of seeds.
TEST(RunGate, StandardErrorScalesAsInverseSqrtTrials) {
  const auto& ctx = context();
  GateRun run;
  run.mode = ControlMode::table_literal;
  run.noise = true;
  run.workers = resolve_workers(std::nullopt);
  std::vector<double> se;
  for (std::size_t n : {100u, 1000u}) {
    double sum = 0.0;
    for (std::uint64_t seed = 1000; seed < 1008; ++seed) {
      run.trials = n;
      run.seed = seed;
      sum += run_gate(ctx, run).standard_error;
    }
    se.push_back(sum / 8);
  }
  EXPECT_NEAR(se[0] / se[1], std::sqrt(10.0), 0.2 * std::sqrt(10.0));
}

TEST(Summarize, PairwiseAndStats) {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 0.001 * static_cast<double>(i);
  EXPECT_NEAR(pairwise_sum(v), 499.5, 1e-10);
  const FidelityStats s = summarize(std::vector<double>{0.9, 0.8, 1.0});
  EXPECT_NEAR(s.mean, 0.9, 1e-15);
  EXPECT_NEAR(s.standard_error, 0.1 / std::sqrt(3.0), 1e-15);
  EXPECT_EQ(summarize(std::vector<double>{0.5}).standard_error, 0.0);
  EXPECT_THROW(summarize(std::vector<double>{}), std::invalid_argument);
  // The reduction tree does not depend on how work was scheduled.
  std::vector<double> rev(v.rbegin(), v.rend());
  EXPECT_EQ(pairwise_sum(v), pairwise_sum(std::vector<double>(v)));
}

TEST(ParallelFor, CoversEveryIndexAndPropagatesErrors) {
  std::vector<int> hit(1000, 0);
  parallel_for(hit.size(), 8, [&](std::size_t i) { hit[i] += 1; });
  for (int h : hit) EXPECT_EQ(h, 1);
  EXPECT_THROW(parallel_for(100, 4, [](std::size_t i) {
                 if (i == 37) throw std::runtime_error("boom");
               }),
               std::runtime_error);
}
