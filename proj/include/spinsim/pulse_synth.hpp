#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "spinsim/qubit_models.hpp"

namespace spinsim {

enum class GateKind { rx, rz };

/// How channels outside the ones a sequence step names are driven.
///   physical      - static channels (ST dEz, HY J) stay at their bias throughout
///   table_literal - ST dEz is pulsed and present only in the steps that name it
enum class ControlMode { physical, table_literal };

/// Shortest string that parses back to the same double.
std::string format_double(double v);

std::string_view to_string(GateKind gate);
std::string_view to_string(ControlMode mode);
GateKind parse_gate_kind(std::string_view name);
ControlMode parse_control_mode(std::string_view name);

struct SequenceStep {
  std::string label;
  double duration = 0.0;       // ns
  std::vector<double> values;  // one per model channel
};

struct GateSequence {
  QubitKind qubit = QubitKind::ss;
  GateKind gate = GateKind::rx;
  ControlMode mode = ControlMode::physical;
  double theta = 0.0;
  std::vector<SequenceStep> steps;
  /// Channel levels before the sequence starts.
  std::vector<double> idle;
  /// Integer chosen for each family of steps that carries one, e.g. {"n", 2}.
  std::vector<std::pair<std::string, long>> n_values;

  double total_duration() const;
  double shortest_step() const;
};

struct SynthesisOptions {
  double t_min = 0.1;  // ns
  ControlMode mode = ControlMode::physical;
  long n_cap = 1'000'000;
};

/// Channel levels before the first step for the given mode.
std::vector<double> idle_values(const QubitModel& model, ControlMode mode);

/// Builds the analytical step sequence for R_gate(theta), theta in (0, 2pi].
/// Integers n are the smallest admissible ones keeping every step >= t_min.
GateSequence synthesize(const QubitModel& model, GateKind gate, double theta,
                        const SynthesisOptions& options);

/// exp(-i sign theta sigma_n / 2).
Matrix2 target_unitary(GateKind gate, double theta, int sign = +1);

/// (|0> + i|1>)/sqrt(2), the equatorial start state used throughout.
StateVector default_initial_state();

/// Exact product of per-step exponentials of the projected Hamiltonian.
Matrix2 sequence_unitary(const QubitModel& model, const GateSequence& seq);

/// Rotation sense for each (qubit, gate) pair.
class SignTable {
 public:
  int sign(QubitKind qubit, GateKind gate) const;
  void set(QubitKind qubit, GateKind gate, int sign);

 private:
  static std::size_t slot(QubitKind qubit, GateKind gate);
  std::array<int, 8> signs_{1, 1, 1, 1, 1, 1, 1, 1};
};

struct CalibrationEntry {
  QubitKind qubit;
  GateKind gate;
  int sign = 1;
  double fidelity_plus = 0.0;
  double fidelity_minus = 0.0;
};

struct CalibrationReport {
  SignTable table;
  std::vector<CalibrationEntry> entries;
};

/// Picks, per (qubit, gate), the rotation sense that the ideal table_literal
/// sequence realizes at theta = pi/2. Throws ValidationError when neither sign
/// reaches `threshold`.
CalibrationReport calibrate_signs(std::span<const QubitModel> models, double t_min,
                                  double threshold = 1.0 - 1e-6);

void write_sign_table_csv(std::ostream& out, const CalibrationReport& report);
SignTable read_sign_table_csv(std::istream& in);

/// Ideal square-edged multi-channel waveform.
struct PiecewiseConstantSignal {
  std::vector<std::string> channel_names;
  std::vector<double> boundaries;           // step_count() + 1 entries, starting at 0
  std::vector<std::vector<double>> values;  // [step][channel]
  std::vector<double> idle;                 // level for t < 0

  std::size_t step_count() const { return values.size(); }
  std::size_t channel_count() const { return channel_names.size(); }
  double duration() const { return boundaries.empty() ? 0.0 : boundaries.back(); }
  double step_duration(std::size_t k) const { return boundaries[k + 1] - boundaries[k]; }
  void validate() const;
};

/// Lays the sequence out over [0, T]. A positive `tail` appends a step at the
/// idle levels so the filtered edges can settle.
PiecewiseConstantSignal to_piecewise(const QubitModel& model, const GateSequence& seq,
                                     std::span<const double> idle, double tail = 0.0);

/// Substep grid for filtered signals. The base step is
/// dt = min(tau, shortest step) / divisor.
struct DtPolicy {
  double divisor = 20.0;
  /// Fine stepping covers this many tau after every edge when adaptive.
  double settle_window = 25.0;
  /// Adaptive stepping kicks in when tau < step / adaptive_ratio.
  double adaptive_ratio = 100.0;

  void validate() const;
};

/// First-order low-pass output sampled on a per-step grid. Between nodes the
/// channel follows the exact RC response to the held input, so the grid and
/// the node samples fully determine the waveform.
struct SampledSignal {
  PiecewiseConstantSignal source;
  double tau = 0.0;
  DtPolicy policy;
  double dt = 0.0;
  std::vector<double> times;                // nodes, first 0, last T
  std::vector<std::vector<double>> samples; // [node][channel] filter output
  std::vector<std::size_t> interval_step;   // source step of each interval

  std::size_t interval_count() const { return times.size() - 1; }
  double held(std::size_t interval, std::size_t channel) const {
    return source.values[interval_step[interval]][channel];
  }
  /// Output at `offset` ns into the interval.
  double value_at(std::size_t interval, std::size_t channel, double offset) const;
  /// Exact mean of the output over the interval.
  double interval_mean(std::size_t interval, std::size_t channel) const;
  /// Same signal on a grid with the given divisor.
  SampledSignal resampled(double divisor) const;
};

SampledSignal apply_lowpass(const PiecewiseConstantSignal& signal, double tau,
                            const DtPolicy& policy = {});

/// step_index,duration_ns,channel,value
void write_sequence_csv(std::ostream& out, const QubitModel& model, const GateSequence& seq);

}  // namespace spinsim
