#include "spinsim/validation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <random>

#include "spinsim/errors.hpp"
#include "spinsim/experiments.hpp"

namespace spinsim {

namespace {

const std::vector<std::pair<QubitKind, GateKind>>& six_gates() {
  static const std::vector<std::pair<QubitKind, GateKind>> all{
      {QubitKind::ss, GateKind::rx}, {QubitKind::ss, GateKind::rz}, {QubitKind::st, GateKind::rx},
      {QubitKind::st, GateKind::rz}, {QubitKind::hy, GateKind::rx}, {QubitKind::hy, GateKind::rz}};
  return all;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

double max_step_leakage(const SimulationContext& ctx, QubitKind qubit, const std::vector<double>& thetas) {
  const QubitModel& model = ctx.model(qubit);
  double worst = 0.0;
  for (GateKind gate : {GateKind::rx, GateKind::rz}) {
    for (ControlMode mode : {ControlMode::physical, ControlMode::table_literal}) {
      for (double theta : thetas) {
        const GateSequence seq = synthesize(model, gate, theta, SynthesisOptions{ctx.t_min, mode});
        for (const auto& step : seq.steps) {
          std::vector<double> t(9);
          for (std::size_t i = 0; i < t.size(); ++i) t[i] = step.duration * static_cast<double>(i) / 8.0;
          worst = std::max(worst, leakage_check(model.full_hamiltonian(step.values), model.basis(),
                                                default_initial_state(), t));
        }
      }
    }
  }
  return worst;
}

}  // namespace

bool ValidationReport::ok() const {
  return std::all_of(items.begin(), items.end(), [](const auto& i) { return i.passed || !i.asserted; });
}

double worst_ideal_fidelity(const SimulationContext& ctx, QubitKind qubit, GateKind gate,
                            const std::vector<double>& thetas) {
  const QubitModel& model = ctx.model(qubit);
  double worst = 1.0;
  for (double theta : thetas) {
    const GateSequence seq =
        synthesize(model, gate, theta, SynthesisOptions{ctx.t_min, ControlMode::table_literal});
    const auto result = evolve_ideal(model, to_piecewise(model, seq, seq.idle), default_initial_state());
    worst = std::min(worst, pure_state_fidelity(target_state(ctx, qubit, gate, theta), result.final_state));
  }
  return worst;
}

OracleSummary oracle_equivalence(const SimulationContext& ctx, QubitKind qubit, std::size_t points,
                                 std::uint64_t seed) {
  const QubitModel& model = ctx.model(qubit);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  OracleSummary out;
  EvolutionOptions logical = ctx.evolution;
  logical.space = EvolutionSpace::logical;
  EvolutionOptions full = ctx.evolution;
  full.space = EvolutionSpace::full;
  const StateVector psi0 = default_initial_state();
  while (out.points < points) {
    const GateKind gate = unit(rng) < 0.5 ? GateKind::rx : GateKind::rz;
    const double theta = units::kTwoPi * (1.0 - unit(rng));  // (0, 2pi]
    const double tau = std::pow(10.0, -3.0 + 5.0 * unit(rng));
    const ControlMode mode = unit(rng) < 0.5 ? ControlMode::physical : ControlMode::table_literal;
    GateSequence seq;
    try {
      seq = synthesize(model, gate, theta, SynthesisOptions{ctx.t_min, mode});
    } catch (const SynthesisError&) {
      continue;  // theta with no admissible sequence; draw again
    }
    const SampledSignal signal = apply_lowpass(to_piecewise(model, seq, seq.idle, ctx.tail), tau, ctx.evolution.dt);
    const EvolutionResult a = evolve_sampled(model, signal, psi0, logical);
    const EvolutionResult b = evolve_sampled(model, signal, psi0, full);
    out.max_trace_distance = std::max(out.max_trace_distance, trace_distance(a.final_state, b.final_state));
    out.max_leakage = std::max(out.max_leakage, b.leakage);
    ++out.points;
  }
  return out;
}

ValidationReport run_validation(const RunConfig& config, std::size_t oracle_points) {
  ValidationReport report;
  SimulationContext ctx = make_context(config);
  const std::vector<QubitModel> models{ctx.ss, ctx.st, ctx.hy};
  report.calibration = calibrate_signs(models, ctx.t_min);
  for (const auto& e : report.calibration.entries) {
    const double f = std::max(e.fidelity_plus, e.fidelity_minus);
    report.items.push_back({"sign_calibration", std::string(to_string(e.qubit)), std::string(to_string(e.gate)), f,
                            1.0 - 1e-6, f >= 1.0 - 1e-6, true, "sign " + std::to_string(e.sign)});
  }

  const std::vector<double> thetas = uniform_theta_grid(32, units::kTwoPi);
  for (QubitKind q : {QubitKind::st, QubitKind::hy}) {
    const double leak = max_step_leakage(ctx, q, thetas);
    report.items.push_back({"step_leakage", std::string(to_string(q)), "", leak, 1e-10, leak < 1e-10, true,
                            "constant step Hamiltonians"});
    const OracleSummary o = oracle_equivalence(ctx, q, oracle_points, config.master_seed);
    report.items.push_back({"oracle_trace_distance", std::string(to_string(q)), "", o.max_trace_distance, 1e-9,
                            o.max_trace_distance < 1e-9, true, std::to_string(o.points) + " random points"});
    report.items.push_back({"oracle_leakage", std::string(to_string(q)), "", o.max_leakage, 1e-10,
                            o.max_leakage < 1e-10, true, std::to_string(o.points) + " random points"});
  }

  for (const auto& [q, g] : six_gates()) {
    const double threshold = q == QubitKind::hy ? 1.0 - 1e-6 : 1.0 - 1e-9;
    ValidationItem item{"ideal_fidelity", std::string(to_string(q)), std::string(to_string(g)), 0.0, threshold,
                        false, true, "worst over 32 thetas in (0, 2pi]"};
    try {
      item.value = worst_ideal_fidelity(ctx, q, g, thetas);
      item.passed = item.value >= threshold;
    } catch (const std::exception& e) {
      item.note = e.what();
    }
    report.items.push_back(item);
  }

  for (double ez : config.hy_ez_scan_uev) {
    SimulationContext c = ctx;
    c.hy = QubitModel::hybrid(HYParams{ez, config.hy_j_uev, config.hy_jmax_uev});
    ValidationItem item{"hy_ez_scan", "hy", "rz", 0.0, 1.0 - 1e-3, false, false,
                        "ez_uev=" + format_double(ez)};
    try {
      item.value = worst_ideal_fidelity(c, QubitKind::hy, GateKind::rz, thetas);
      item.passed = item.value >= item.threshold;
    } catch (const std::exception& e) {
      item.note += std::string("; ") + e.what();
    }
    report.items.push_back(item);
  }
  return report;
}

void write_validation_csv(std::ostream& out, const ValidationReport& report) {
  out << "check,qubit,gate,value,threshold,passed,asserted,note\n";
  for (const auto& i : report.items) {
    out << i.check << ',' << i.qubit << ',' << i.gate << ',' << format_double(i.value) << ','
        << format_double(i.threshold) << ',' << (i.passed ? 1 : 0) << ',' << (i.asserted ? 1 : 0) << ','
        << csv_field(i.note) << '\n';
  }
}

}  // namespace spinsim
