#pragma once

#include <complex>

namespace sqmag {

/// One asymmetric dc SQUID, linearized: zero-field Josephson inductance,
/// junction asymmetry d = |Ic1 - Ic2| / (Ic1 + Ic2), total junction
/// capacitance and loop area.
struct SquidElement {
  double lj0 = 0.0;   // H
  double d = 0.0;     // dimensionless, [0, 1)
  double c = 0.0;     // F
  double area = 0.0;  // m^2

  void validate() const;
};

/// Two SQUIDs in series, shunted by the effective capacitance
/// cshunt = Cs + Cc (antenna plus port coupling; the two only appear summed).
struct CircuitParams {
  SquidElement squid1;
  SquidElement squid2;
  double cshunt = 0.0;  // F

  void validate() const;
};

/// Dressed eigenfrequencies in hertz.
struct ModePair {
  double f_minus = 0.0;
  double f_plus = 0.0;
  bool plus_visible = true;
  bool minus_visible = true;
};

/// Zero-field energy scales, all expressed as frequencies (E / h) in hertz.
struct DerivedEnergies {
  double ej1 = 0.0, ej2 = 0.0;
  double ec1 = 0.0, ec2 = 0.0;
  double anharmonicity1 = 0.0, anharmonicity2 = 0.0;
  double fpl1 = 0.0, fpl2 = 0.0;
  bool transmon1 = false, transmon2 = false;  // E_J / E_c > kTransmonRatio
};

inline constexpr double kTransmonRatio = 50.0;
inline constexpr double kDefaultDarkThreshold = 5e-3;

struct EigenOptions {
  // plus mode is flagged dark when |W1 - W2| / (W1 + W2) drops below this.
  double dark_threshold = kDefaultDarkThreshold;
};

/// Reduces a flux (in flux quanta) to [-1/2, 1/2].
double wrap_flux(double phi) noexcept;

/// L_J(phi) = L_J0 / (|cos(pi phi)| sqrt(1 + d^2 tan^2(pi phi))), evaluated in
/// the equivalent form L_J0 / sqrt(cos^2 + d^2 sin^2) so that the half-integer
/// point returns L_J0 / d. Throws DivergentInductance for d = 0 at half-integer
/// flux.
double josephson_inductance(const SquidElement& squid, double phi);

/// I_c(phi) = Phi0 / (2 pi L_J(phi)); vanishes at half-integer flux when d = 0.
double critical_current(const SquidElement& squid, double phi);

/// Bare angular frequency 1 / sqrt(L (C + cshunt)) in rad/s.
double bare_angular_frequency(double inductance, double capacitance, double cshunt);
inline double bare_angular_frequency(const SquidElement& squid, double cshunt) {
  return bare_angular_frequency(squid.lj0, squid.c, cshunt);
}

/// beta = 1 - cshunt^2 / ((C1 + cshunt)(C2 + cshunt)).
double coupling_beta(const CircuitParams& params);

/// Closed-form dressed modes for the given (flux dependent) SQUID inductances.
ModePair eigenfrequencies(const CircuitParams& params, double l1, double l2,
                          const EigenOptions& options = {});

/// Admittance of the two SQUIDs in series, Y1 Y2 / (Y1 + Y2).
std::complex<double> squid_series_admittance(const CircuitParams& params, double l1, double l2,
                                             double omega);

/// Admittance of the shunted branch, j omega cshunt + Y_sq. Its zeros are the
/// zeros of the input impedance seen through the coupling capacitor.
std::complex<double> shunted_branch_admittance(const CircuitParams& params, double l1, double l2,
                                               double omega);

/// Z_in = 1 / (j omega Cc) + 1 / (j omega Cs + 1 / Z_sq) with Cs = cshunt - Cc.
/// Requires 0 < coupling_capacitance <= cshunt.
std::complex<double> input_impedance(const CircuitParams& params, double l1, double l2,
                                     double omega, double coupling_capacitance);

DerivedEnergies derived_energies(const CircuitParams& params);

}  // namespace sqmag
