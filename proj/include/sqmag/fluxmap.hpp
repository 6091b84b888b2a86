#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "sqmag/circuit.hpp"

namespace sqmag {

/// Coil calibration: B = b (I_b - I_0). ibc is the critical bias current,
/// so the critical field is |b| * ibc.
struct FieldCalibration {
  double b = 0.0;    // T/A
  double i0 = 0.0;   // A
  double ibc = 0.0;  // A

  void validate() const;
  double critical_field() const;
};

/// Flux through both loops in units of the flux quantum.
struct FluxState {
  double phi1 = 0.0;
  double phi2 = 0.0;
};

/// Reduced area ratio a/b and the resulting modulation period M = b Phi0.
struct ModulationPeriod {
  std::int64_t numerator = 0;
  std::int64_t denominator = 1;
  std::int64_t period_phi0 = 1;
  std::optional<double> period_field;  // T, when the small-loop area is known
};

inline constexpr double kDefaultPeriodTolerance = 1e-6;
inline constexpr std::int64_t kDefaultMaxDenominator = 10000;

double field_from_bias(const FieldCalibration& cal, double ib);

FluxState flux_from_bias(const FieldCalibration& cal, double a1, double a2, double ib);

/// min of the two per-SQUID critical currents.
double combined_critical_current(const SquidElement& s1, const SquidElement& s2,
                                 const FluxState& flux);

/// Smallest-denominator rational within tol of r, found along the
/// continued-fraction expansion (convergents and intermediate fractions).
/// Throws NoRationalWithinBound if none has denominator <= max_denominator.
ModulationPeriod modulation_period(double r, double tol = kDefaultPeriodTolerance,
                                   std::int64_t max_denominator = kDefaultMaxDenominator,
                                   std::optional<double> area1 = std::nullopt);

/// Two-fluid gap suppression Delta(B)/Delta00 = sqrt((1 - x^2) / (1 + x^2)), x = B/Bc.
double gap_suppression_factor(double b_perp, double bc);

/// Flux-modulated SQUID inductances rescaled by 1 / gap_suppression_factor.
std::pair<double, double> effective_inductances(const CircuitParams& params,
                                                const FieldCalibration& cal, double ib);

}  // namespace sqmag
