#pragma once

#include <numbers>

namespace sqmag {

// SI 2019 exact values.
struct PhysicalConstants {
  static constexpr double planck = 6.62607015e-34;           // J s
  static constexpr double electron_charge = 1.602176634e-19;  // C
  static constexpr double hbar = planck / (2.0 * std::numbers::pi);
  static constexpr double flux_quantum = planck / (2.0 * electron_charge);  // Wb
};

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kFluxQuantum = PhysicalConstants::flux_quantum;

}  // namespace sqmag
