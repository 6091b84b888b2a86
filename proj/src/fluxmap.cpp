#include "sqmag/fluxmap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"

namespace sqmag {

void FieldCalibration::validate() const {
  if (!(std::isfinite(b) && b != 0.0)) fail(ErrorCode::InvalidArgument, "FieldCalibration: b must be nonzero");
  if (!std::isfinite(i0)) fail(ErrorCode::InvalidArgument, "FieldCalibration: i0 must be finite");
  if (!(std::isfinite(ibc) && ibc > 0.0)) fail(ErrorCode::InvalidArgument, "FieldCalibration: ibc must be > 0");
}

double FieldCalibration::critical_field() const { return std::abs(b) * ibc; }

double field_from_bias(const FieldCalibration& cal, double ib) { return cal.b * (ib - cal.i0); }

FluxState flux_from_bias(const FieldCalibration& cal, double a1, double a2, double ib) {
  if (!(a1 > 0.0 && a2 > 0.0)) fail(ErrorCode::InvalidArgument, "flux_from_bias: areas must be > 0");
  const double field = field_from_bias(cal, ib);
  return {field * a1 / kFluxQuantum, field * a2 / kFluxQuantum};
}

double combined_critical_current(const SquidElement& s1, const SquidElement& s2,
                                 const FluxState& flux) {
  return std::min(critical_current(s1, flux.phi1), critical_current(s2, flux.phi2));
}

namespace {

bool within(std::int64_t p, std::int64_t q, double r, double tol) {
  return std::abs(static_cast<double>(p) / static_cast<double>(q) - r) <= tol;
}

}  // namespace

ModulationPeriod modulation_period(double r, double tol, std::int64_t max_denominator,
                                   std::optional<double> area1) {
  if (!(std::isfinite(r) && r > 0.0)) fail(ErrorCode::InvalidArgument, "modulation_period: r must be > 0");
  if (!(tol >= 0.0)) fail(ErrorCode::InvalidArgument, "modulation_period: tol must be >= 0");
  if (max_denominator < 1) fail(ErrorCode::InvalidArgument, "modulation_period: max_denominator must be >= 1");
  if (r > 1e15) fail(ErrorCode::InvalidArgument, "modulation_period: r too large");

  auto finish = [&](std::int64_t p, std::int64_t q) {
    const std::int64_t g = std::gcd(p, q);
    ModulationPeriod out;
    out.numerator = p / g;
    out.denominator = q / g;
    out.period_phi0 = out.denominator;
    if (area1) out.period_field = static_cast<double>(out.denominator) * kFluxQuantum / *area1;
    return out;
  };

  // Convergent recurrence p_k = a_k p_{k-1} + p_{k-2}; the remainder x_{k+1}
  // is recomputed from the two latest convergents, which keeps the partial
  // quotients accurate far longer than iterating reciprocals.
  const long double rl = r;
  std::int64_t p_prev2 = 0, q_prev2 = 1;  // p_{-2}/q_{-2}
  std::int64_t p_prev1 = 1, q_prev1 = 0;  // p_{-1}/q_{-1}
  long double x = rl;
  for (int level = 0; level < 200; ++level) {
    const long double a_ld = std::floor(x);
    const std::int64_t a = a_ld > 4e18L ? std::numeric_limits<std::int64_t>::max() / 4
                                        : static_cast<std::int64_t>(a_ld);
    if (level == 0) {
      if (within(a, 1, r, tol)) return finish(a, 1);
      if (within(a + 1, 1, r, tol)) return finish(a + 1, 1);
    } else {
      // Intermediate fractions (p_{k-2} + j p_{k-1}) / (q_{k-2} + j q_{k-1}),
      // j = 1..a, approach r monotonically from one side.
      std::int64_t j_max = a;
      const std::int64_t room = (max_denominator - q_prev2) / q_prev1;
      const bool capped = room < j_max;
      j_max = std::min(j_max, room);
      if (j_max >= 1 && within(p_prev2 + j_max * p_prev1, q_prev2 + j_max * q_prev1, r, tol)) {
        std::int64_t lo = 1, hi = j_max;
        while (lo < hi) {
          const std::int64_t mid = lo + (hi - lo) / 2;
          if (within(p_prev2 + mid * p_prev1, q_prev2 + mid * q_prev1, r, tol))
            hi = mid;
          else
            lo = mid + 1;
        }
        return finish(p_prev2 + lo * p_prev1, q_prev2 + lo * q_prev1);
      }
      if (capped) break;
    }
    const std::int64_t p = a * p_prev1 + p_prev2;
    const std::int64_t q = a * q_prev1 + q_prev2;
    const long double err = static_cast<long double>(q) * rl - static_cast<long double>(p);
    if (err == 0.0L) break;  // exact, and it failed the tolerance test above
    const long double err_prev =
        static_cast<long double>(q_prev1) * rl - static_cast<long double>(p_prev1);
    x = -err_prev / err;
    p_prev2 = p_prev1;
    q_prev2 = q_prev1;
    p_prev1 = p;
    q_prev1 = q;
    if (q > max_denominator) break;
  }
  std::ostringstream msg;
  msg << "modulation_period: no rational within " << tol << " of " << r
      << " with denominator <= " << max_denominator;
  fail(ErrorCode::NoRationalWithinBound, msg.str());
}

double gap_suppression_factor(double b_perp, double bc) {
  if (!(bc > 0.0)) fail(ErrorCode::InvalidArgument, "gap_suppression_factor: bc must be > 0");
  if (!(std::abs(b_perp) <= bc)) {
    std::ostringstream msg;
    msg << "field " << b_perp << " T exceeds critical field " << bc << " T";
    fail(ErrorCode::FieldAboveCritical, msg.str());
  }
  const double x2 = (b_perp / bc) * (b_perp / bc);
  return std::sqrt((1.0 - x2) / (1.0 + x2));
}

std::pair<double, double> effective_inductances(const CircuitParams& params,
                                                const FieldCalibration& cal, double ib) {
  const double field = field_from_bias(cal, ib);
  const double bc = cal.critical_field();
  if (!(std::abs(field) < bc)) {
    std::ostringstream msg;
    msg << "bias " << ib << " A gives field " << field << " T at or above critical field " << bc << " T";
    fail(ErrorCode::FieldAboveCritical, msg.str());
  }
  const double gap = gap_suppression_factor(field, bc);
  const FluxState flux = flux_from_bias(cal, params.squid1.area, params.squid2.area, ib);
  return {josephson_inductance(params.squid1, flux.phi1) / gap,
          josephson_inductance(params.squid2, flux.phi2) / gap};
}

}  // namespace sqmag
