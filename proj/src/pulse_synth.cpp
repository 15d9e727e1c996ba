#include "spinsim/pulse_synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "spinsim/errors.hpp"

namespace spinsim {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

namespace {

constexpr double kSqrt3 = 1.7320508075688772;
using units::kPi;
using units::kPlanck;
using units::kTwoPi;

void check_theta(double theta) {
  if (!std::isfinite(theta) || theta <= 0.0 || theta > kTwoPi) {
    throw std::invalid_argument("theta must lie in (0, 2pi], got " + format_double(theta));
  }
}

// Smallest integer n >= start with duration(n) >= t_min for every duration.
template <typename Durations>
long smallest_admissible_n(long start, long cap, double t_min, Durations durations,
                           const std::string& what) {
  for (long n = std::max(0L, start); n <= cap; ++n) {
    const auto ds = durations(n);
    if (std::all_of(ds.begin(), ds.end(), [&](double d) { return d >= t_min && d > 0.0; })) {
      return n;
    }
  }
  throw SynthesisError("no admissible n <= " + std::to_string(cap) + " for " + what +
                       ": every step must last at least t_min = " + format_double(t_min) + " ns");
}

SequenceStep make_step(std::string label, double duration, std::vector<double> values) {
  return SequenceStep{std::move(label), duration, std::move(values)};
}

void synthesize_ss(const QubitModel& model, GateSequence& seq, const SynthesisOptions& opt) {
  const double omega = model.ss().omega();
  const double dwz = model.ss().delta_omega_z();
  if (!(omega > 0.0)) throw SynthesisError("ss: drive amplitude must be nonzero");
  auto require = [&](double d, const char* label) {
    if (d < opt.t_min) {
      throw SynthesisError(std::string("ss ") + label + " step of " + format_double(d) +
                           " ns is shorter than t_min");
    }
  };
  const double t_x = seq.theta / omega;
  require(t_x, "x");
  if (seq.gate == GateKind::rx) {
    seq.steps.push_back(make_step("x", t_x, {omega, 0.0, dwz}));
    return;
  }
  // The negative-time -pi/2 rotation about +y is a +pi/2 rotation about -y
  // (drive phase 3pi/2).
  const double t_y = (kPi / 2.0) / omega;
  require(t_y, "y");
  seq.steps.push_back(make_step("-y", t_y, {0.0, -omega, dwz}));
  seq.steps.push_back(make_step("x", t_x, {omega, 0.0, dwz}));
  seq.steps.push_back(make_step("+y", t_y, {0.0, omega, dwz}));
}

void synthesize_st(const QubitModel& model, GateSequence& seq, const SynthesisOptions& opt) {
  const double dez = model.st().delta_ez;
  const double j = model.st().j;
  if (!(dez > 0.0)) throw SynthesisError("st: delta_ez must be > 0");
  const double period_z = kPlanck / dez;
  const double theta = seq.theta;

  if (seq.gate == GateKind::rx) {
    const long n = smallest_admissible_n(
        0, opt.n_cap, opt.t_min,
        [&](long k) { return std::array{(theta / (2.0 * kTwoPi) + static_cast<double>(k)) * period_z}; },
        "st rx");
    seq.n_values.emplace_back("n", n);
    seq.steps.push_back(make_step(
        "dEz", (theta / (2.0 * kTwoPi) + static_cast<double>(n)) * period_z, {dez, 0.0}));
    return;
  }

  if (!(j > 0.0)) throw SynthesisError("st: j must be > 0 for rz");
  const double period_j = kPlanck / j;
  const long n_z = smallest_admissible_n(
      0, opt.n_cap, opt.t_min,
      [&](long k) { return std::array{0.5 * static_cast<double>(k) * period_z}; }, "st rz (t_z)");
  const long n_j = smallest_admissible_n(
      0, opt.n_cap, opt.t_min,
      [&](long k) { return std::array{(-theta / kTwoPi + static_cast<double>(k)) * period_j}; },
      "st rz (t_J)");
  seq.n_values.emplace_back("n_z", n_z);
  seq.n_values.emplace_back("n_J", n_j);
  const double dez_during_j = seq.mode == ControlMode::physical ? dez : 0.0;
  seq.steps.push_back(make_step("dEz", 0.5 * static_cast<double>(n_z) * period_z, {dez, 0.0}));
  seq.steps.push_back(make_step(
      "J", (-theta / kTwoPi + static_cast<double>(n_j)) * period_j, {dez_during_j, j}));
}

void synthesize_hy(const QubitModel& model, GateSequence& seq, const SynthesisOptions& opt) {
  const HYParams& p = model.hy();
  const double jmax = p.jmax;
  const double c = p.c();
  const double theta = seq.theta;

  if (seq.gate == GateKind::rx) {
    const double rot = (1.0 / kSqrt3) * (theta / kTwoPi) / jmax;
    auto durations = [&](long k) {
      const double base = static_cast<double>(k) / c;
      return std::array{(base - rot) * kPlanck, (base + rot) * kPlanck};
    };
    if (!(c > 0.0)) throw SynthesisError("hy: C = Ez + 3/4 Jmax must be > 0");
    const double start = std::ceil((c / jmax) * (1.0 / kSqrt3) * (theta / kTwoPi));
    const long n = smallest_admissible_n(static_cast<long>(start), opt.n_cap, opt.t_min,
                                         durations, "hy rx");
    seq.n_values.emplace_back("n", n);
    const auto d = durations(n);
    seq.steps.push_back(make_step("J1", d[0], {p.j, jmax, 0.0}));
    seq.steps.push_back(make_step("J2", d[1], {p.j, 0.0, jmax}));
    return;
  }

  const double side = (2.0 * kPi / 3.0) - theta;
  const double sgn = side > 0.0 ? 1.0 : (side < 0.0 ? -1.0 : 0.0);
  const double t12 = (1.0 / c) * ((theta / kPi) * p.a() + sgn * p.b()) * kPlanck / jmax;
  const double t12_abs = std::abs(t12);
  if (!(t12_abs >= opt.t_min)) {
    throw SynthesisError("hy rz: |t_J1| = " + format_double(t12_abs) +
                         " ns is below t_min and carries no free integer");
  }
  const long n = smallest_admissible_n(
      0, opt.n_cap, opt.t_min,
      [&](long k) {
        return std::array{(2.0 - theta / kPi + 2.0 * static_cast<double>(k)) * kPlanck / jmax};
      },
      "hy rz (t_J)");
  seq.n_values.emplace_back("n", n);
  // A negative t_J1 = t_J2 is realized by swapping the order of the two
  // equal-length exchange pulses.
  if (t12 >= 0.0) {
    seq.steps.push_back(make_step("J1", t12_abs, {p.j, jmax, 0.0}));
    seq.steps.push_back(make_step("J2", t12_abs, {p.j, 0.0, jmax}));
  } else {
    seq.steps.push_back(make_step("J2", t12_abs, {p.j, 0.0, jmax}));
    seq.steps.push_back(make_step("J1", t12_abs, {p.j, jmax, 0.0}));
  }
  seq.steps.push_back(make_step(
      "J", (2.0 - theta / kPi + 2.0 * static_cast<double>(n)) * kPlanck / jmax, {p.j, 0.0, 0.0}));
}

}  // namespace

std::string_view to_string(GateKind gate) { return gate == GateKind::rx ? "rx" : "rz"; }

std::string_view to_string(ControlMode mode) {
  return mode == ControlMode::physical ? "physical" : "table_literal";
}

GateKind parse_gate_kind(std::string_view name) {
  if (name == "rx") return GateKind::rx;
  if (name == "rz") return GateKind::rz;
  throw std::invalid_argument("unknown gate '" + std::string(name) + "'");
}

ControlMode parse_control_mode(std::string_view name) {
  if (name == "physical") return ControlMode::physical;
  if (name == "table_literal") return ControlMode::table_literal;
  throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

double GateSequence::total_duration() const {
  double t = 0.0;
  for (const auto& s : steps) t += s.duration;
  return t;
}

double GateSequence::shortest_step() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& s : steps) m = std::min(m, s.duration);
  return m;
}

std::vector<double> idle_values(const QubitModel& model, ControlMode mode) {
  std::vector<double> idle = model.static_values();
  if (model.kind() == QubitKind::st && mode == ControlMode::table_literal) {
    idle[model.channel_index("delta_ez")] = 0.0;
  }
  return idle;
}

GateSequence synthesize(const QubitModel& model, GateKind gate, double theta,
                        const SynthesisOptions& options) {
  check_theta(theta);
  if (!(options.t_min > 0.0)) throw std::invalid_argument("t_min must be > 0");
  GateSequence seq;
  seq.qubit = model.kind();
  seq.gate = gate;
  seq.mode = options.mode;
  seq.theta = theta;
  seq.idle = idle_values(model, options.mode);
  switch (model.kind()) {
    case QubitKind::ss: synthesize_ss(model, seq, options); break;
    case QubitKind::st: synthesize_st(model, seq, options); break;
    case QubitKind::hy: synthesize_hy(model, seq, options); break;
    case QubitKind::noop:
      // Nothing is applied; one idle step stands in for the gate window.
      seq.steps.push_back(make_step("idle", std::max(options.t_min, 1.0), {}));
      break;
  }
  return seq;
}

Matrix2 target_unitary(GateKind gate, double theta, int sign) {
  check_theta(theta);
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  const double half = 0.5 * static_cast<double>(sign) * theta;
  const Matrix2 axis = gate == GateKind::rx ? pauli_x() : pauli_z();
  return std::cos(half) * Matrix2::Identity() - Complex(0.0, std::sin(half)) * axis;
}

StateVector default_initial_state() {
  StateVector psi(2);
  psi << 1.0 / std::sqrt(2.0), Complex(0.0, 1.0 / std::sqrt(2.0));
  return psi;
}

Matrix2 sequence_unitary(const QubitModel& model, const GateSequence& seq) {
  Matrix2 u = Matrix2::Identity();
  for (const auto& step : seq.steps) {
    u = pauli_expm(model.logical_hamiltonian(step.values), step.duration) * u;
  }
  return u;
}

std::size_t SignTable::slot(QubitKind qubit, GateKind gate) {
  return static_cast<std::size_t>(qubit) * 2 + (gate == GateKind::rx ? 0 : 1);
}

int SignTable::sign(QubitKind qubit, GateKind gate) const { return signs_[slot(qubit, gate)]; }

void SignTable::set(QubitKind qubit, GateKind gate, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
  signs_[slot(qubit, gate)] = sign;
}

CalibrationReport calibrate_signs(std::span<const QubitModel> models, double t_min,
                                  double threshold) {
  CalibrationReport report;
  const StateVector psi0 = default_initial_state();
  const double theta = kPi / 2.0;
  for (const QubitModel& model : models) {
    if (model.kind() == QubitKind::noop) continue;
    for (GateKind gate : {GateKind::rx, GateKind::rz}) {
      const GateSequence seq =
          synthesize(model, gate, theta, SynthesisOptions{t_min, ControlMode::table_literal});
      const StateVector out = sequence_unitary(model, seq) * psi0;
      CalibrationEntry e{model.kind(), gate};
      e.fidelity_plus = std::norm((target_unitary(gate, theta, +1) * psi0).dot(out));
      e.fidelity_minus = std::norm((target_unitary(gate, theta, -1) * psi0).dot(out));
      e.sign = e.fidelity_plus >= e.fidelity_minus ? 1 : -1;
      if (std::max(e.fidelity_plus, e.fidelity_minus) < threshold) {
        throw ValidationError("sign calibration failed for " + std::string(to_string(model.kind())) +
                              " " + std::string(to_string(gate)) + ": F(+1) = " +
                              format_double(e.fidelity_plus) + ", F(-1) = " +
                              format_double(e.fidelity_minus));
      }
      report.table.set(model.kind(), gate, e.sign);
      report.entries.push_back(e);
    }
  }
  return report;
}

void write_sign_table_csv(std::ostream& out, const CalibrationReport& report) {
  out << "qubit,gate,sign,fidelity_plus,fidelity_minus\n";
  for (const auto& e : report.entries) {
    out << to_string(e.qubit) << ',' << to_string(e.gate) << ',' << e.sign << ','
        << format_double(e.fidelity_plus) << ',' << format_double(e.fidelity_minus) << '\n';
  }
}

SignTable read_sign_table_csv(std::istream& in) {
  SignTable table;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("sign table: empty input");
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string qubit, gate, sign;
    if (!std::getline(ss, qubit, ',') || !std::getline(ss, gate, ',') || !std::getline(ss, sign, ',')) {
      throw ConfigError("sign table line " + std::to_string(line_no) + ": malformed");
    }
    try {
      table.set(parse_qubit_kind(qubit), parse_gate_kind(gate), std::stoi(sign));
    } catch (const std::exception& e) {
      throw ConfigError("sign table line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return table;
}

void PiecewiseConstantSignal::validate() const {
  if (values.empty()) throw std::invalid_argument("signal has no steps");
  if (boundaries.size() != values.size() + 1) throw std::invalid_argument("signal boundary count mismatch");
  if (idle.size() != channel_names.size()) throw std::invalid_argument("signal idle/channel mismatch");
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (values[k].size() != channel_names.size()) {
      throw std::invalid_argument("signal step " + std::to_string(k) + " has wrong channel count");
    }
    if (!(boundaries[k + 1] > boundaries[k])) {
      throw std::invalid_argument("signal boundaries must be strictly increasing");
    }
  }
}

PiecewiseConstantSignal to_piecewise(const QubitModel& model, const GateSequence& seq,
                                     std::span<const double> idle, double tail) {
  if (seq.steps.empty()) throw std::invalid_argument("to_piecewise: empty sequence");
  if (idle.size() != model.channels().size()) throw std::invalid_argument("to_piecewise: idle size mismatch");
  if (tail < 0.0) throw std::invalid_argument("to_piecewise: negative tail");
  PiecewiseConstantSignal sig;
  for (const auto& ch : model.channels()) sig.channel_names.push_back(ch.name);
  sig.idle.assign(idle.begin(), idle.end());
  sig.boundaries.push_back(0.0);
  for (const auto& step : seq.steps) {
    if (!(step.duration > 0.0)) throw std::invalid_argument("to_piecewise: nonpositive duration");
    sig.boundaries.push_back(sig.boundaries.back() + step.duration);
    sig.values.push_back(step.values);
  }
  if (tail > 0.0) {
    sig.boundaries.push_back(sig.boundaries.back() + tail);
    sig.values.push_back(sig.idle);
  }
  sig.validate();
  return sig;
}

void DtPolicy::validate() const {
  if (!(divisor >= 20.0)) throw std::invalid_argument("dt divisor must be >= 20");
  if (!(settle_window > 0.0)) throw std::invalid_argument("settle window must be > 0");
  if (!(adaptive_ratio > 0.0)) throw std::invalid_argument("adaptive ratio must be > 0");
}

double SampledSignal::value_at(std::size_t interval, std::size_t channel, double offset) const {
  const double u = held(interval, channel);
  const double y0 = samples[interval][channel];
  return u + (y0 - u) * std::exp(-offset / tau);
}

double SampledSignal::interval_mean(std::size_t interval, std::size_t channel) const {
  const double u = held(interval, channel);
  const double y0 = samples[interval][channel];
  const double h = times[interval + 1] - times[interval];
  // (1/h) * integral_0^h e^{-s/tau} ds = -tau * expm1(-h/tau) / h
  return u + (y0 - u) * (-tau * std::expm1(-h / tau) / h);
}

SampledSignal SampledSignal::resampled(double divisor) const {
  DtPolicy p = policy;
  p.divisor = divisor;
  return apply_lowpass(source, tau, p);
}

SampledSignal apply_lowpass(const PiecewiseConstantSignal& signal, double tau,
                            const DtPolicy& policy) {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("apply_lowpass: tau must be > 0");
  if (signal.values.empty()) throw std::invalid_argument("apply_lowpass: empty signal");
  signal.validate();
  policy.validate();

  double shortest = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < signal.step_count(); ++k) shortest = std::min(shortest, signal.step_duration(k));

  SampledSignal out;
  out.source = signal;
  out.tau = tau;
  out.policy = policy;
  out.dt = std::min(tau, shortest) / policy.divisor;

  const std::size_t nch = signal.channel_count();
  std::vector<double> y = signal.idle;
  out.times.push_back(0.0);
  out.samples.push_back(y);

  auto advance = [&](std::size_t step, double h) {
    const double decay = std::exp(-h / tau);
    for (std::size_t c = 0; c < nch; ++c) {
      const double u = signal.values[step][c];
      y[c] = u + (y[c] - u) * decay;
    }
    out.times.push_back(out.times.back() + h);
    out.samples.push_back(y);
    out.interval_step.push_back(step);
  };

  for (std::size_t k = 0; k < signal.step_count(); ++k) {
    const double length = signal.step_duration(k);
    const double start = signal.boundaries[k];
    double jump = 0.0;
    for (std::size_t c = 0; c < nch; ++c) jump = std::max(jump, std::abs(y[c] - signal.values[k][c]));

    double fine = length;
    if (jump == 0.0) {
      fine = 0.0;
    } else if (tau < length / policy.adaptive_ratio) {
      fine = std::min(length, policy.settle_window * tau);
    }
    if (fine > 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(fine / out.dt - 1e-9));
      const double h = fine / static_cast<double>(n);
      for (std::size_t i = 0; i < n; ++i) advance(k, h);
    }
    if (fine < length) advance(k, length - fine);
    // Pin the node to the exact boundary to keep rounding from drifting.
    out.times.back() = start + length;
  }
  return out;
}

void write_sequence_csv(std::ostream& out, const QubitModel& model, const GateSequence& seq) {
  out << "step_index,duration_ns,channel,value\n";
  for (std::size_t k = 0; k < seq.steps.size(); ++k) {
    for (std::size_t c = 0; c < model.channels().size(); ++c) {
      out << k << ',' << format_double(seq.steps[k].duration) << ',' << model.channels()[c].name << ','
          << format_double(seq.steps[k].values[c]) << '\n';
    }
  }
}

}  // namespace spinsim
