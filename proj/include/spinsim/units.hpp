#pragma once

#include <numbers>

// Internal unit system: energies in micro-electronvolts, times in nanoseconds,
// angular frequencies in rad/ns. Everything external is converted at the
// config/CLI boundary with the helpers below.
namespace spinsim::units {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduced Planck constant in ueV*ns.
inline constexpr double kHbar = 0.6582119569;
/// Planck constant in ueV*ns.
inline constexpr double kPlanck = 4.135667696;

inline constexpr double neV_to_ueV(double v) { return v * 1e-3; }
inline constexpr double ueV_to_neV(double v) { return v * 1e3; }
inline constexpr double ps_to_ns(double v) { return v * 1e-3; }

/// Cyclic frequency in Hz to angular frequency in rad/ns.
inline constexpr double hz_to_rad_per_ns(double f) { return kTwoPi * f * 1e-9; }
inline constexpr double rad_per_ns_to_hz(double w) { return w / kTwoPi * 1e9; }

}  // namespace spinsim::units
