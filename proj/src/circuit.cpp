#include "sqmag/circuit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"

namespace sqmag {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

// sqrt(cos^2(pi phi) + d^2 sin^2(pi phi)); equals |cos| sqrt(1 + d^2 tan^2).
double modulation_factor(double d, double phi) {
  const double arg = kPi * wrap_flux(phi);
  const double c = std::cos(arg);
  const double s = std::sin(arg);
  return std::sqrt(c * c + d * d * s * s);
}

}  // namespace

void SquidElement::validate() const {
  if (!positive_finite(lj0)) fail(ErrorCode::InvalidArgument, "SquidElement: lj0 must be > 0");
  if (!positive_finite(c)) fail(ErrorCode::InvalidArgument, "SquidElement: c must be > 0");
  if (!positive_finite(area)) fail(ErrorCode::InvalidArgument, "SquidElement: area must be > 0");
  if (!(d >= 0.0 && d < 1.0)) fail(ErrorCode::InvalidArgument, "SquidElement: d must be in [0, 1)");
}

void CircuitParams::validate() const {
  squid1.validate();
  squid2.validate();
  if (!(std::isfinite(cshunt) && cshunt >= 0.0))
    fail(ErrorCode::InvalidArgument, "CircuitParams: cshunt must be >= 0");
}

double wrap_flux(double phi) noexcept { return phi - std::round(phi); }

double josephson_inductance(const SquidElement& squid, double phi) {
  if (!std::isfinite(phi)) fail(ErrorCode::InvalidArgument, "josephson_inductance: flux is not finite");
  if (squid.d == 0.0) {
    const double distance = 0.5 - std::abs(wrap_flux(phi));
    if (distance <= 64.0 * kEps * std::max(1.0, std::abs(phi)))
      fail(ErrorCode::DivergentInductance,
           "josephson_inductance: symmetric SQUID at half-integer flux " + std::to_string(phi));
  }
  return squid.lj0 / modulation_factor(squid.d, phi);
}

double critical_current(const SquidElement& squid, double phi) {
  const double ic_sum = kFluxQuantum / (kTwoPi * squid.lj0);
  return ic_sum * modulation_factor(squid.d, phi);
}

double bare_angular_frequency(double inductance, double capacitance, double cshunt) {
  return 1.0 / std::sqrt(inductance * (capacitance + cshunt));
}

double coupling_beta(const CircuitParams& params) {
  const double cs = params.cshunt;
  return 1.0 - cs * cs / ((params.squid1.c + cs) * (params.squid2.c + cs));
}

ModePair eigenfrequencies(const CircuitParams& params, double l1, double l2,
                          const EigenOptions& options) {
  const double cs = params.cshunt;
  const double w1 = 1.0 / (l1 * (params.squid1.c + cs));  // Omega_1^2
  const double w2 = 1.0 / (l2 * (params.squid2.c + cs));
  const double beta = coupling_beta(params);

  // (W1 - W2)^2 + 4 W1 W2 (1 - beta) is the discriminant written without
  // cancellation; the minus root follows from the product W1 W2 / beta.
  const double diff = w1 - w2;
  const double disc = diff * diff + 4.0 * w1 * w2 * (1.0 - beta);
  const double plus_sq = (w1 + w2 + std::sqrt(disc)) / (2.0 * beta);
  const double minus_sq = w1 * w2 / (beta * plus_sq);

  ModePair modes;
  modes.f_plus = std::sqrt(plus_sq) / kTwoPi;
  modes.f_minus = std::sqrt(minus_sq) / kTwoPi;
  const double omega1 = std::sqrt(w1);
  const double omega2 = std::sqrt(w2);
  modes.plus_visible = std::abs(omega1 - omega2) / (omega1 + omega2) >= options.dark_threshold;
  modes.minus_visible = true;
  return modes;
}

std::complex<double> squid_series_admittance(const CircuitParams& params, double l1, double l2,
                                             double omega) {
  using namespace std::complex_literals;
  const std::complex<double> y1 = 1i * omega * params.squid1.c + 1.0 / (1i * omega * l1);
  const std::complex<double> y2 = 1i * omega * params.squid2.c + 1.0 / (1i * omega * l2);
  const double scale = std::abs(y1) + std::abs(y2);
  if (scale == 0.0) return 0.0;  // both SQUIDs exactly at their plasma frequency
  const std::complex<double> sum = y1 + y2;
  if (std::abs(sum) <= 4.0 * kEps * scale)
    fail(ErrorCode::PoleProximity, "squid_series_admittance: series resonance of the SQUID pair");
  return y1 * y2 / sum;
}

std::complex<double> shunted_branch_admittance(const CircuitParams& params, double l1, double l2,
                                               double omega) {
  using namespace std::complex_literals;
  if (!positive_finite(omega)) fail(ErrorCode::InvalidArgument, "omega must be > 0");
  return 1i * omega * params.cshunt + squid_series_admittance(params, l1, l2, omega);
}

std::complex<double> input_impedance(const CircuitParams& params, double l1, double l2,
                                     double omega, double coupling_capacitance) {
  using namespace std::complex_literals;
  if (!positive_finite(omega)) fail(ErrorCode::InvalidArgument, "input_impedance: omega must be > 0");
  if (!(coupling_capacitance > 0.0 && coupling_capacitance <= params.cshunt))
    fail(ErrorCode::InvalidArgument, "input_impedance: need 0 < Cc <= cshunt");
  const double cs = params.cshunt - coupling_capacitance;
  const std::complex<double> ysq = squid_series_admittance(params, l1, l2, omega);
  const std::complex<double> shunt = 1i * omega * cs + ysq;
  if (std::abs(shunt) <= 4.0 * kEps * (omega * cs + std::abs(ysq)))
    fail(ErrorCode::PoleProximity, "input_impedance: parallel resonance of the shunted SQUIDs");
  return 1.0 / (1i * omega * coupling_capacitance) + 1.0 / shunt;
}

DerivedEnergies derived_energies(const CircuitParams& params) {
  params.validate();
  constexpr double h = PhysicalConstants::planck;
  constexpr double e = PhysicalConstants::electron_charge;
  const double c1 = params.squid1.c;
  const double c2 = params.squid2.c;
  const double cs = params.cshunt;
  const double det = c1 * c2 + (c1 + c2) * cs;  // C_star^2
  const double c1_eff = det / (c2 + cs);
  const double c2_eff = det / (c1 + cs);

  DerivedEnergies out;
  out.ec1 = e * e / (2.0 * c1_eff) / h;
  out.ec2 = e * e / (2.0 * c2_eff) / h;
  const double phi0_sq = kFluxQuantum * kFluxQuantum;
  out.ej1 = phi0_sq / (4.0 * kPi * kPi * params.squid1.lj0) / h;
  out.ej2 = phi0_sq / (4.0 * kPi * kPi * params.squid2.lj0) / h;
  out.anharmonicity1 = -out.ec1;
  out.anharmonicity2 = -out.ec2;
  out.fpl1 = 1.0 / (kTwoPi * std::sqrt(params.squid1.lj0 * c1));
  out.fpl2 = 1.0 / (kTwoPi * std::sqrt(params.squid2.lj0 * c2));
  out.transmon1 = out.ej1 / out.ec1 > kTransmonRatio;
  out.transmon2 = out.ej2 / out.ec2 > kTransmonRatio;
  return out;
}

}  // namespace sqmag
