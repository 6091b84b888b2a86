#pragma once

#include <complex>
#include <vector>

namespace sqmag {

/// Two-level reflection parameters. Rates are angular (rad/s).
struct ResonanceParams {
  double f0 = 0.0;         // Hz
  double kappa = 0.0;      // external coupling
  double gamma = 0.0;      // internal decay
  double gamma_phi = 0.0;  // pure dephasing

  void validate() const;
  double gamma1() const { return kappa + gamma; }
  double gamma2() const { return 0.5 * gamma1() + gamma_phi; }
};

struct DriveSettings {
  double f_drive = 0.0;         // Hz
  double p_in_dbm = 0.0;        // at room temperature
  double attenuation_db = 0.0;  // input line
  double rabi = 0.0;            // rad/s
};

inline constexpr double kDefaultRabiPrefactor = 2.0;

/// S11 = 1 - kappa G1 (G2 + i D) / (G1 (G2^2 + D^2) + G2 W^2), D = omega_d - omega_0.
std::complex<double> reflection(const ResonanceParams& res, double delta, double rabi);

/// Power reaching the device in watts.
double device_power(double p_in_dbm, double attenuation_db);

/// Omega_R = prefactor * sqrt(kappa P / (h f0)).
double rabi_from_power(const DriveSettings& drive, const ResonanceParams& res,
                       double prefactor = kDefaultRabiPrefactor);

struct RabiPowerPoint {
  double p_in_dbm = 0.0;
  double rabi = 0.0;  // rad/s
};

struct CalibrationOptions {
  double prefactor = kDefaultRabiPrefactor;
  double slope_tolerance = 0.1;  // relative to 1/20 decade per dB
  double min_span_db = 6.0;
  bool enforce_slope = true;     // throw SlopeMismatch instead of flagging
};

struct AttenuationCalibration {
  double attenuation_db = 0.0;
  double residual_rms_db = 0.0;
  double free_slope = 0.0;        // decades of Omega_R per dB
  double slope_deviation = 0.0;   // |free_slope * 20 - 1|
  bool slope_ok = true;
};

/// Fixed-slope (sqrt P) least squares of log10 Omega_R against input power.
AttenuationCalibration calibrate_attenuation(const std::vector<RabiPowerPoint>& points,
                                             const ResonanceParams& res,
                                             const CalibrationOptions& options = {});

}  // namespace sqmag
