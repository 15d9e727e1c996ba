#include "spinsim/noise.hpp"

#include <bit>
#include <cmath>
#include <stdexcept>

#include "spinsim/errors.hpp"

namespace spinsim {

namespace {

constexpr std::uint64_t kPhiloxM0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kPhiloxM1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& lo, std::uint64_t& hi) {
  const unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
  lo = static_cast<std::uint64_t>(p);
  hi = static_cast<std::uint64_t>(p >> 64);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// 53-bit uniform in (0, 1].
double to_unit_open_low(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace

Philox4x64::Counter Philox4x64::block(Counter ctr, Key key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kWeyl0;
      key[1] += kWeyl1;
    }
    std::uint64_t lo0, hi0, lo1, hi1;
    mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
    mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

std::uint64_t point_key(QubitKind qubit, GateKind gate, double theta) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(qubit) + 1);
  h = splitmix64(h ^ (static_cast<std::uint64_t>(gate) + 0x100));
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(theta));
  return h;
}

GaussianStream::GaussianStream(const TrialSeed& seed)
    : key_{seed.master, seed.point}, trial_(seed.trial) {}

double GaussianStream::operator()(std::uint64_t index) const {
  // Each Philox block yields two Box-Muller pairs, i.e. four deviates.
  const auto out = Philox4x64::block({trial_, index / 4, 0, 0}, key_);
  const std::uint64_t pair = (index % 4) / 2;
  const double u1 = to_unit_open_low(out[2 * pair]);
  const double u2 = to_unit_open_low(out[2 * pair + 1]);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double phi = units::kTwoPi * u2;
  return (index % 2 == 0) ? r * std::cos(phi) : r * std::sin(phi);
}

bool NoiseSpec::is_zero() const {
  for (double s : sigma) {
    if (s != 0.0) return false;
  }
  return true;
}

void NoiseSpec::validate() const {
  for (double s : sigma) {
    if (!std::isfinite(s) || s < 0.0) throw ConfigError("noise sigma must be finite and >= 0");
  }
}

std::vector<double> draw_offsets(const NoiseSpec& spec, const TrialSeed& seed) {
  spec.validate();
  const GaussianStream normal(seed);
  std::vector<double> offsets(spec.sigma.size(), 0.0);
  for (std::size_t c = 0; c < offsets.size(); ++c) {
    if (spec.sigma[c] > 0.0) offsets[c] = spec.sigma[c] * normal(c);
  }
  return offsets;
}

PiecewiseConstantSignal perturb(const PiecewiseConstantSignal& signal,
                                const std::vector<double>& offsets, bool noise_when_off) {
  if (offsets.size() != signal.channel_count()) {
    throw std::invalid_argument("perturb: offset count does not match channel count");
  }
  PiecewiseConstantSignal out = signal;
  for (auto& step : out.values) {
    for (std::size_t c = 0; c < offsets.size(); ++c) {
      if (noise_when_off || step[c] != 0.0) step[c] += offsets[c];
    }
  }
  if (noise_when_off) {
    for (std::size_t c = 0; c < offsets.size(); ++c) out.idle[c] += offsets[c];
  }
  return out;
}

}  // namespace spinsim
