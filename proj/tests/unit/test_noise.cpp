#include <gtest/gtest.h>

#include <cmath>

#include "spinsim/errors.hpp"
#include "spinsim/noise.hpp"

using namespace spinsim;

// Known-answer blocks for Philox4x64-10 (Random123 / numpy reference values).
TEST(Philox, KnownAnswers) {
  using C = Philox4x64::Counter;
  EXPECT_EQ(Philox4x64::block({1, 0, 0, 0}, {0, 0}),
            (C{0x02f4ba6408e4d89bULL, 0x3dd62b0b9ca8c5b2ULL, 0x1c8667a55d902e79ULL, 0x907d7a052fd5b4dcULL}));
  EXPECT_EQ(Philox4x64::block({2, 0, 0, 0}, {0, 0}),
            (C{0x809bf322883987c3ULL, 0x471128b9e807f7ddULL, 0xf250ba0dbec065b7ULL, 0xfc6ed66767a457bcULL}));
  const std::uint64_t ones = ~0ULL;
  EXPECT_EQ(Philox4x64::block({0, 0, 0, 0}, {ones, ones}),
            (C{0x44b7493d1acfc229ULL, 0x6636af8e997921ddULL, 0x3f73e132b5b3780eULL, 0x605644dde03b01b1ULL}));
}

TEST(GaussianStream, Deterministic) {
  const TrialSeed s{12345, 7, 99};
  const GaussianStream a(s), b(s);
  for (std::uint64_t i = 0; i < 16; ++i) EXPECT_EQ(a(i), b(i));
  const GaussianStream other_trial(TrialSeed{12345, 8, 99});
  const GaussianStream other_point(TrialSeed{12345, 7, 100});
  EXPECT_NE(a(0), other_trial(0));
  EXPECT_NE(a(0), other_point(0));
}

TEST(GaussianStream, Moments) {
  constexpr int n = 100000;
  const double sigma = 4.0;
  const NoiseSpec spec{{sigma}};
  double sum = 0, sum2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = draw_offsets(spec, TrialSeed{2024, static_cast<std::uint64_t>(i), 1})[0];
    sum += x;
    sum2 += x * x;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sum2 / n - mean * mean);
  EXPECT_LT(std::abs(sd - sigma) / sigma, 0.02);
  EXPECT_LT(std::abs(mean), 3 * sigma / std::sqrt(double(n)));
}

TEST(GaussianStream, ChannelsUncorrelated) {
  constexpr int n = 20000;
  const NoiseSpec spec{{1.0, 1.0, 1.0}};
  double sxy = 0, syz = 0;
  for (int i = 0; i < n; ++i) {
    const auto o = draw_offsets(spec, TrialSeed{5, static_cast<std::uint64_t>(i), 3});
    sxy += o[0] * o[1];
    syz += o[1] * o[2];
  }
  EXPECT_LT(std::abs(sxy / n), 4 / std::sqrt(double(n)));
  EXPECT_LT(std::abs(syz / n), 4 / std::sqrt(double(n)));
}

TEST(DrawOffsets, ZeroSigmaGivesZeros) {
  const NoiseSpec spec{{0.0, 0.0}};
  EXPECT_TRUE(spec.is_zero());
  for (std::uint64_t t = 0; t < 10; ++t) {
    for (double v : draw_offsets(spec, TrialSeed{1, t, 2})) EXPECT_EQ(v, 0.0);
  }
}

TEST(DrawOffsets, RejectsNegativeSigma) {
  EXPECT_THROW(draw_offsets(NoiseSpec{{-1.0}}, TrialSeed{}), ConfigError);
  EXPECT_THROW(NoiseSpec{{std::nan("")}}.validate(), ConfigError);
}

TEST(PointKey, ThetaAndGateDistinguishTauDoesNot) {
  EXPECT_EQ(point_key(QubitKind::ss, GateKind::rx, 1.0), point_key(QubitKind::ss, GateKind::rx, 1.0));
  EXPECT_NE(point_key(QubitKind::ss, GateKind::rx, 1.0), point_key(QubitKind::ss, GateKind::rz, 1.0));
  EXPECT_NE(point_key(QubitKind::ss, GateKind::rx, 1.0), point_key(QubitKind::st, GateKind::rx, 1.0));
  EXPECT_NE(point_key(QubitKind::ss, GateKind::rx, 1.0), point_key(QubitKind::ss, GateKind::rx, 1.0 + 1e-15));
}

namespace {

PiecewiseConstantSignal two_channel() {
  PiecewiseConstantSignal s;
  s.channel_names = {"a", "b"};
  s.boundaries = {0.0, 1.0, 3.0, 4.0};
  s.values = {{0.032, 0.0}, {0.032, 0.7}, {0.0, 0.0}};
  s.idle = {0.032, 0.0};
  return s;
}

}  // namespace

TEST(Perturb, ZeroOffsetsIdentical) {
  const auto s = two_channel();
  const auto p = perturb(s, {0.0, 0.0});
  EXPECT_EQ(p.values, s.values);
  EXPECT_EQ(p.idle, s.idle);
  EXPECT_EQ(p.boundaries, s.boundaries);
}

// Within one trial the offset is the same constant at every step.
TEST(Perturb, QuasiStatic) {
  const auto s = two_channel();
  const std::vector<double> off{0.004, -0.001};
  const auto p = perturb(s, off, true);
  for (std::size_t k = 0; k < s.step_count(); ++k) {
    for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(p.values[k][c] - s.values[k][c], off[c], 1e-17);
  }
  for (std::size_t c = 0; c < 2; ++c) EXPECT_NEAR(p.idle[c] - s.idle[c], off[c], 1e-17);
}

TEST(Perturb, OffLevelsUntouchedWhenRequested) {
  const auto s = two_channel();
  const auto p = perturb(s, {0.004, -0.001}, false);
  EXPECT_EQ(p.values[0][1], 0.0);
  EXPECT_EQ(p.values[2][0], 0.0);
  EXPECT_NEAR(p.values[1][1], 0.699, 1e-15);
  EXPECT_EQ(p.idle, s.idle);
}

TEST(Perturb, ChannelMismatch) {
  EXPECT_THROW(perturb(two_channel(), {1.0}), std::invalid_argument);
}
