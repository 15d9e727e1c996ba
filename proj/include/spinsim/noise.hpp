#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "spinsim/pulse_synth.hpp"

namespace spinsim {

/// Philox4x64-10 counter-based generator (Salmon et al., SC'11). Stateless:
/// the same (key, counter) always maps to the same 256 output bits.
class Philox4x64 {
 public:
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter counter, Key key);
};

/// Identifies one Monte Carlo draw. `point` keys the sweep point; trials at
/// the same point share nothing but the master seed.
struct TrialSeed {
  std::uint64_t master = 0;
  std::uint64_t trial = 0;
  std::uint64_t point = 0;
};

/// Stable sweep-point key for (qubit, gate, theta). The filter constant is
/// deliberately left out so a trial sees the same disturbance at every tau.
std::uint64_t point_key(QubitKind qubit, GateKind gate, double theta);

/// Standard normal deviates keyed by a TrialSeed (Box-Muller on Philox output).
class GaussianStream {
 public:
  explicit GaussianStream(const TrialSeed& seed);
  double operator()(std::uint64_t index) const;

 private:
  Philox4x64::Key key_;
  std::uint64_t trial_;
};

/// Quasi-static zero-mean Gaussian offsets, one standard deviation per
/// channel in the channel's own units.
struct NoiseSpec {
  std::vector<double> sigma;
  /// Offset also applies where the nominal level is zero, including idle.
  bool noise_when_off = true;

  bool is_zero() const;
  void validate() const;
};

std::vector<double> draw_offsets(const NoiseSpec& spec, const TrialSeed& seed);

PiecewiseConstantSignal perturb(const PiecewiseConstantSignal& signal,
                                const std::vector<double>& offsets, bool noise_when_off = true);

}  // namespace spinsim
