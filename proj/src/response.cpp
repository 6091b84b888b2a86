#include "sqmag/response.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"

namespace sqmag {

void ResonanceParams::validate() const {
  if (!(std::isfinite(f0) && f0 > 0.0)) fail(ErrorCode::InvalidArgument, "ResonanceParams: f0 must be > 0");
  if (!(kappa >= 0.0 && gamma >= 0.0 && gamma_phi >= 0.0))
    fail(ErrorCode::InvalidArgument, "ResonanceParams: rates must be >= 0");
  if (!(gamma2() > 0.0)) fail(ErrorCode::InvalidArgument, "ResonanceParams: Gamma2 must be > 0");
}

std::complex<double> reflection(const ResonanceParams& res, double delta, double rabi) {
  const double g1 = res.gamma1();
  const double g2 = res.gamma2();
  if (!(g2 > 0.0)) fail(ErrorCode::InvalidArgument, "reflection: Gamma2 must be > 0");
  const double denom = g1 * (g2 * g2 + delta * delta) + g2 * rabi * rabi;
  const std::complex<double> num(res.kappa * g1 * g2, res.kappa * g1 * delta);
  return 1.0 - num / denom;
}

double device_power(double p_in_dbm, double attenuation_db) {
  return std::pow(10.0, (p_in_dbm - attenuation_db - 30.0) / 10.0);
}

double rabi_from_power(const DriveSettings& drive, const ResonanceParams& res, double prefactor) {
  if (!std::isfinite(drive.p_in_dbm)) fail(ErrorCode::InvalidArgument, "rabi_from_power: power must be finite");
  const double p = device_power(drive.p_in_dbm, drive.attenuation_db);
  return prefactor * std::sqrt(res.kappa * p / (PhysicalConstants::planck * res.f0));
}

AttenuationCalibration calibrate_attenuation(const std::vector<RabiPowerPoint>& points,
                                             const ResonanceParams& res,
                                             const CalibrationOptions& options) {
  res.validate();
  if (!(res.kappa > 0.0)) fail(ErrorCode::InvalidArgument, "calibrate_attenuation: kappa must be > 0");
  if (points.size() < 2)
    fail(ErrorCode::InsufficientSpan, "calibrate_attenuation: need at least 2 (power, Rabi) pairs");
  double pmin = points.front().p_in_dbm, pmax = pmin;
  for (const auto& pt : points) {
    if (!(std::isfinite(pt.p_in_dbm) && pt.rabi > 0.0 && std::isfinite(pt.rabi)))
      fail(ErrorCode::InvalidArgument, "calibrate_attenuation: powers must be finite and Rabi rates > 0");
    pmin = std::min(pmin, pt.p_in_dbm);
    pmax = std::max(pmax, pt.p_in_dbm);
  }
  if (pmax - pmin < options.min_span_db) {
    std::ostringstream msg;
    msg << "calibrate_attenuation: power span " << pmax - pmin << " dB below " << options.min_span_db << " dB";
    fail(ErrorCode::InsufficientSpan, msg.str());
  }

  // log10 Omega = (p - A - 30) / 20 + c, c = log10(prefactor sqrt(kappa / (h f0)))
  const double c =
      std::log10(options.prefactor * std::sqrt(res.kappa / (PhysicalConstants::planck * res.f0)));
  const double n = static_cast<double>(points.size());
  double sum_a = 0.0;
  for (const auto& pt : points) sum_a += pt.p_in_dbm - 30.0 - 20.0 * (std::log10(pt.rabi) - c);
  AttenuationCalibration out;
  out.attenuation_db = sum_a / n;
  double ss = 0.0;
  for (const auto& pt : points) {
    const double a_i = pt.p_in_dbm - 30.0 - 20.0 * (std::log10(pt.rabi) - c);
    ss += (a_i - out.attenuation_db) * (a_i - out.attenuation_db);
  }
  out.residual_rms_db = std::sqrt(ss / n);

  double mp = 0.0, my = 0.0;
  for (const auto& pt : points) {
    mp += pt.p_in_dbm;
    my += std::log10(pt.rabi);
  }
  mp /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (const auto& pt : points) {
    sxy += (pt.p_in_dbm - mp) * (std::log10(pt.rabi) - my);
    sxx += (pt.p_in_dbm - mp) * (pt.p_in_dbm - mp);
  }
  out.free_slope = sxy / sxx;
  out.slope_deviation = std::abs(out.free_slope * 20.0 - 1.0);
  out.slope_ok = out.slope_deviation <= options.slope_tolerance;
  if (!out.slope_ok && options.enforce_slope) {
    std::ostringstream msg;
    msg << "calibrate_attenuation: free slope " << out.free_slope * 20.0
        << " x (1/20 per dB) deviates from the square-root law by more than "
        << options.slope_tolerance * 100.0 << "%";
    fail(ErrorCode::SlopeMismatch, msg.str());
  }
  return out;
}

}  // namespace sqmag
