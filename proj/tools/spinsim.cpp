// spinsim command-line front end: validate, rotate, sweep.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include "spinsim/config.hpp"
#include "spinsim/errors.hpp"
#include "spinsim/experiments.hpp"
#include "spinsim/validation.hpp"

namespace fs = std::filesystem;
using namespace spinsim;

namespace {

enum ExitCode { kOk = 0, kConfig = 2, kValidation = 3, kRuntime = 4 };

struct Common {
  std::string config_path;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::optional<std::size_t> workers;
  bool noise = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "Configuration file (built-in defaults when omitted)");
  cmd->add_option("--trials", c.trials, "Monte Carlo trials per point");
  cmd->add_option("--seed", c.seed, "Master seed");
  cmd->add_option("--mode", c.mode, "physical | table_literal");
  cmd->add_option("--workers", c.workers, "Worker threads (falls back to SPINSIM_WORKERS)");
  cmd->add_flag("--noise", c.noise, "Enable quasi-static input disturbances");
}

RunConfig load(const Common& c) {
  RunConfig cfg = c.config_path.empty() ? default_config() : load_config(c.config_path);
  if (c.trials) cfg.trials = *c.trials;
  if (c.seed) cfg.master_seed = *c.seed;
  if (!c.mode.empty()) cfg.mode = parse_control_mode(c.mode);
  cfg.validate();
  return cfg;
}

// "0.1ns", "100ps", "2us", or a bare number in ns.
double parse_duration_ns(const std::string& text) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a duration: '" + text + "'");
  }
  const std::string unit = text.substr(used);
  double scale = 1.0;
  if (unit.empty() || unit == "ns") {
    scale = 1.0;
  } else if (unit == "ps") {
    scale = 1e-3;
  } else if (unit == "us") {
    scale = 1e3;
  } else if (unit == "ms") {
    scale = 1e6;
  } else if (unit == "s") {
    scale = 1e9;
  } else {
    throw ConfigError("unknown time unit '" + unit + "' in '" + text + "'");
  }
  if (!std::isfinite(v) || v <= 0.0) throw ConfigError("duration must be > 0: '" + text + "'");
  return v * scale;
}

int cmd_validate(const Common& c, const std::string& out_path, const std::string& signs_path,
                 std::size_t oracle_points) {
  const RunConfig cfg = load(c);
  const ValidationReport report = run_validation(cfg, oracle_points);
  for (const auto& i : report.items) {
    std::cout << (i.passed ? "PASS " : (i.asserted ? "FAIL " : "NOTE ")) << i.check;
    if (!i.qubit.empty()) std::cout << ' ' << i.qubit;
    if (!i.gate.empty()) std::cout << ' ' << i.gate;
    std::cout << ": " << format_double(i.value) << " (threshold " << format_double(i.threshold) << ")";
    if (!i.note.empty()) std::cout << " " << i.note;
    std::cout << '\n';
  }
  if (!out_path.empty()) {
    std::ofstream out(out_path);
    if (!out) throw std::runtime_error("cannot write " + out_path);
    write_validation_csv(out, report);
  }
  if (!signs_path.empty()) {
    std::ofstream out(signs_path);
    if (!out) throw std::runtime_error("cannot write " + signs_path);
    write_sign_table_csv(out, report.calibration);
  }
  std::cout << (report.ok() ? "validation passed\n" : "validation FAILED\n");
  return report.ok() ? kOk : kValidation;
}

int cmd_rotate(const Common& c, const std::string& qubit, const std::string& gate, double theta,
               const std::string& tau_text, bool oracle) {
  const RunConfig cfg = load(c);
  SimulationContext ctx = make_context(cfg);
  if (oracle) ctx.evolution.space = EvolutionSpace::full;
  GateRun run;
  run.qubit = parse_qubit_kind(qubit);
  run.gate = parse_gate_kind(gate);
  run.theta = theta;
  run.tau = parse_duration_ns(tau_text);
  run.mode = cfg.mode;
  run.noise = c.noise;
  run.trials = cfg.trials;
  run.seed = cfg.master_seed;
  run.workers = resolve_workers(c.workers);
  const FidelityStats s = run_gate(ctx, run);
  SweepRow row;
  row.qubit = run.qubit;
  row.gate = run.gate;
  row.theta = run.theta;
  row.tau = run.tau;
  row.noise = run.noise;
  row.trials = s.trials;
  row.seed = run.seed;
  row.mode = run.mode;
  row.fidelity_mean = s.mean;
  row.fidelity_stderr = s.standard_error;
  write_csv_header(std::cout);
  write_csv_row(std::cout, row);
  return kOk;
}

struct SweepArgs {
  std::string kind;
  std::vector<std::string> qubits;
  std::vector<std::string> gates;
  std::string out;
  std::string plot;
  bool resume = false;
  std::optional<double> ez;
};

int cmd_sweep(const Common& c, const SweepArgs& a) {
  const RunConfig cfg = load(c);
  const SimulationContext ctx = make_context(cfg);

  SweepSpec spec;
  spec.thetas = theta_grid(cfg);
  spec.taus = tau_grid(cfg);
  spec.trials = cfg.trials;
  spec.seed = cfg.master_seed;
  spec.mode = cfg.mode;
  spec.workers = resolve_workers(c.workers);
  spec.hy_ez = a.ez;
  if (!a.qubits.empty()) {
    spec.qubits.clear();
    for (const auto& q : a.qubits) spec.qubits.push_back(parse_qubit_kind(q));
  }
  if (!a.gates.empty()) {
    spec.gates.clear();
    for (const auto& g : a.gates) spec.gates.push_back(parse_gate_kind(g));
  }

  std::optional<SweepResult> previous;
  if (a.resume && !a.out.empty() && fs::exists(a.out)) {
    std::ifstream in(a.out);
    previous = read_csv(in);
    std::cerr << "resuming: " << previous->rows.size() << " rows already present\n";
  }

  std::unique_ptr<std::ofstream> file;
  std::ostream* out = &std::cout;
  if (!a.out.empty()) {
    file = std::make_unique<std::ofstream>(a.out, std::ios::trunc);
    if (!*file) throw std::runtime_error("cannot write " + a.out);
    out = file.get();
  }
  write_csv_header(*out);
  const RowSink sink = [out](const SweepRow& row) {
    write_csv_row(*out, row);
    out->flush();
  };
  const SweepResult* prev = previous ? &*previous : nullptr;

  SweepResult result;
  PlotKind plot_kind = PlotKind::lines;
  if (a.kind == "heatmap") {
    result = heatmap_theta_tau(ctx, spec, c.noise, prev, sink);
    plot_kind = PlotKind::heatmap;
  } else if (a.kind == "linecut") {
    result = linecut_theta(ctx, spec, cfg.linecut_tau_ns, prev, sink);
  } else {
    if (spec.gates.size() != 1) throw ConfigError("tau-compare needs exactly one --gate");
    spec.taus = compare_tau_grid(cfg);
    spec.noise_settings = {c.noise};
    result = tau_compare(ctx, spec, spec.gates.front(), cfg.compare_theta_over_pi * units::kPi, prev, sink);
  }
  if (file) file->close();

  if (!a.plot.empty()) write_svg(a.plot, result, plot_kind);
  for (const auto& check : verify(result)) {
    std::cerr << (check.passed ? "PASS " : "FAIL ") << check.name << ": " << check.detail << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pulse-level simulator for single-spin, singlet-triplet and hybrid spin qubits"};
  app.require_subcommand(1);
  Common common;

  auto* validate = app.add_subcommand("validate", "Calibrate signs and run the correctness checks");
  add_common(validate, common);
  std::string validate_out, signs_out;
  std::size_t oracle_points = 20;
  validate->add_option("--out", validate_out, "Write the report as CSV");
  validate->add_option("--signs", signs_out, "Write the calibrated sign table as CSV");
  validate->add_option("--oracle-points", oracle_points, "Random points per qubit for the full-space check");

  auto* rotate = app.add_subcommand("rotate", "Fidelity of a single rotation");
  add_common(rotate, common);
  std::string qubit = "ss", gate = "rx", tau = "0.1ns";
  double theta = units::kPi / 2.0;
  bool oracle = false;
  rotate->add_option("--qubit", qubit, "ss | st | hy | noop");
  rotate->add_option("--gate", gate, "rx | rz");
  rotate->add_option("--theta", theta, "Rotation angle in rad");
  rotate->add_option("--tau", tau, "Filter time constant, e.g. 0.1ns or 100ps");
  rotate->add_flag("--oracle", oracle, "Propagate in the full spin space");

  auto* sweep = app.add_subcommand("sweep", "Run a figure-level study");
  add_common(sweep, common);
  SweepArgs sweep_args;
  sweep->add_option("kind", sweep_args.kind, "heatmap | linecut | tau-compare")
      ->required()
      ->check(CLI::IsMember({"heatmap", "linecut", "tau-compare"}));
  sweep->add_option("--qubit", sweep_args.qubits, "Restrict to these qubits (repeatable)");
  sweep->add_option("--gate", sweep_args.gates, "Restrict to these gates (repeatable)");
  sweep->add_option("--out", sweep_args.out, "CSV output path (stdout when omitted)");
  sweep->add_option("--plot", sweep_args.plot, "Also render an SVG");
  sweep->add_flag("--resume", sweep_args.resume, "Reuse rows already present in --out");
  sweep->add_option("--ez-uev", sweep_args.ez, "Override the HY Zeeman energy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*validate) return cmd_validate(common, validate_out, signs_out, oracle_points);
    if (*rotate) return cmd_rotate(common, qubit, gate, theta, tau, oracle);
    return cmd_sweep(common, sweep_args);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kConfig;
  } catch (const ValidationError& e) {
    std::cerr << "validation failure: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
}
