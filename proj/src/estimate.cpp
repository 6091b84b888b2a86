#include "sqmag/estimate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"

namespace sqmag {

namespace {

constexpr std::array<const char*, kParamCount> kNames{"L1", "L2", "C1", "C2", "Cs", "r",
                                                     "d1", "d2", "Ip", "I0", "Ibc"};
constexpr std::array<const char*, kParamCount> kUnits{"pH", "pH", "fF", "fF", "fF", "",
                                                     "",   "",   "mA", "nA", "mA"};
constexpr ParamArray kScales{1e-12, 1e-12, 1e-15, 1e-15, 1e-15, 1.0, 1.0, 1.0, 1e-3, 1e-9, 1e-3};

constexpr double kResidualUnit = 1e6;  // residuals handled in MHz

}  // namespace

const char* param_name(Param p) { return kNames[static_cast<int>(p)]; }
const char* param_unit(Param p) { return kUnits[static_cast<int>(p)]; }
double param_scale(Param p) { return kScales[static_cast<int>(p)]; }

void DeviceModel::validate() const {
  circuit().validate();
  if (!(std::isfinite(r) && r > 0.0)) fail(ErrorCode::InvalidArgument, "DeviceModel: r must be > 0");
  if (!(std::isfinite(ip) && ip > 0.0)) fail(ErrorCode::InvalidArgument, "DeviceModel: Ip must be > 0");
  if (!std::isfinite(i0)) fail(ErrorCode::InvalidArgument, "DeviceModel: I0 must be finite");
  if (!(std::isfinite(ibc) && ibc > 0.0)) fail(ErrorCode::InvalidArgument, "DeviceModel: Ibc must be > 0");
  if (!(std::isfinite(a1) && a1 > 0.0)) fail(ErrorCode::InvalidArgument, "DeviceModel: A1 must be > 0");
}

ParamArray DeviceModel::to_array() const { return {l1, l2, c1, c2, cs, r, d1, d2, ip, i0, ibc}; }

DeviceModel DeviceModel::from_array(const ParamArray& v, double a1) {
  DeviceModel m;
  m.l1 = v[0];
  m.l2 = v[1];
  m.c1 = v[2];
  m.c2 = v[3];
  m.cs = v[4];
  m.r = v[5];
  m.d1 = v[6];
  m.d2 = v[7];
  m.ip = v[8];
  m.i0 = v[9];
  m.ibc = v[10];
  m.a1 = a1;
  return m;
}

CircuitParams DeviceModel::circuit() const {
  CircuitParams p;
  p.squid1 = {l1, d1, c1, a1};
  p.squid2 = {l2, d2, c2, r * a1};
  p.cshunt = cs;
  return p;
}

FieldCalibration DeviceModel::calibration() const { return {kFluxQuantum / (ip * a1), i0, ibc}; }

namespace {

std::pair<double, double> inductances(const DeviceModel& m, const CircuitParams& c, double phi1,
                                      const ModelOptions& options) {
  double l1 = josephson_inductance(c.squid1, phi1);
  double l2 = josephson_inductance(c.squid2, m.r * phi1);
  if (options.gap_suppression) {
    // x = B / Bc = (ib - I0) / Ibc; the coil factor cancels
    const double ratio = phi1 * m.ip / m.ibc;
    if (!(std::abs(ratio) < 1.0)) {
      std::ostringstream msg;
      msg << "bias offset " << phi1 * m.ip << " A reaches the critical bias current " << m.ibc << " A";
      fail(ErrorCode::FieldAboveCritical, msg.str());
    }
    const double gap = gap_suppression_factor(ratio, 1.0);
    l1 /= gap;
    l2 /= gap;
  }
  return {l1, l2};
}

}  // namespace

ModePair forward_mode_at_flux(const DeviceModel& model, double phi1, const ModelOptions& options) {
  const CircuitParams c = model.circuit();
  const auto [l1, l2] = inductances(model, c, phi1, options);
  EigenOptions eo;
  eo.dark_threshold = options.dark_threshold;
  return eigenfrequencies(c, l1, l2, eo);
}

ModePair forward_mode(const DeviceModel& model, double ib, const ModelOptions& options) {
  return forward_mode_at_flux(model, model.phi1(ib), options);
}

std::vector<ModePair> forward_spectrum(const DeviceModel& model, const std::vector<double>& ib,
                                       const ModelOptions& options) {
  model.validate();
  std::vector<ModePair> out;
  out.reserve(ib.size());
  for (double i : ib) out.push_back(forward_mode(model, i, options));
  return out;
}

int minus_mode_loop(const DeviceModel& model, double ib, const ModelOptions& options) {
  const CircuitParams c = model.circuit();
  const auto [l1, l2] = inductances(model, c, model.phi1(ib), options);
  EigenOptions eo;
  eo.dark_threshold = options.dark_threshold;
  const double w_minus = kTwoPi * eigenfrequencies(c, l1, l2, eo).f_minus;
  const double w1 = bare_angular_frequency(l1, c.squid1.c, c.cshunt);
  const double w2 = bare_angular_frequency(l2, c.squid2.c, c.cshunt);
  return std::abs(w1 - w_minus) <= std::abs(w2 - w_minus) ? 1 : 2;
}

ParamBounds default_bounds(const DeviceModel& init, const std::vector<SpectroscopyPoint>& data) {
  ParamBounds b;
  const ParamArray v = init.to_array();
  for (int i : {0, 1, 2, 3}) {
    b.lower[i] = v[i] / 5.0;
    b.upper[i] = v[i] * 5.0;
  }
  b.lower[4] = init.cs > 0.0 ? init.cs / 5.0 : 0.0;
  b.upper[4] = init.cs > 0.0 ? init.cs * 5.0 : 1e-12;
  b.lower[5] = init.r / 2.0;
  b.upper[5] = init.r * 2.0;
  b.lower[6] = b.lower[7] = 0.0;
  b.upper[6] = b.upper[7] = 0.95;
  b.lower[8] = init.ip / 3.0;
  b.upper[8] = init.ip * 3.0;
  b.lower[9] = init.i0 - init.ip;
  b.upper[9] = init.i0 + init.ip;
  double max_ib = 0.0;
  for (const auto& p : data) max_ib = std::max(max_ib, std::abs(p.ib));
  // every data point must stay below the critical bias for any admissible I0
  b.lower[10] = (max_ib + std::abs(init.i0) + init.ip) * (1.0 + 1e-9);
  b.upper[10] = std::max(init.ibc, b.lower[10]) * 100.0;
  return b;
}

namespace {

struct FitProblem {
  const std::vector<SpectroscopyPoint>* data;
  std::vector<std::size_t> used;  // indices into data
  std::vector<int> free_index;    // parameter index of each optimizer coordinate
  ParamArray frozen;              // SI values of all parameters (frozen ones used as is)
  double a1;
  ModelOptions model;

  DeviceModel unpack(const Eigen::VectorXd& x) const {
    ParamArray v = frozen;
    for (std::size_t k = 0; k < free_index.size(); ++k)
      v[free_index[k]] = x(static_cast<Eigen::Index>(k)) * kScales[free_index[k]];
    return DeviceModel::from_array(v, a1);
  }

  void residuals(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    const DeviceModel m = unpack(x);
    r.resize(static_cast<Eigen::Index>(used.size()));
    for (std::size_t k = 0; k < used.size(); ++k) {
      const SpectroscopyPoint& p = (*data)[used[k]];
      const ModePair modes = forward_mode(m, p.ib, model);
      const double f = p.branch == Branch::Minus ? modes.f_minus : modes.f_plus;
      r(static_cast<Eigen::Index>(k)) = std::sqrt(p.weight) * (f - p.freq) / kResidualUnit;
    }
  }
};

void check_data(const std::vector<SpectroscopyPoint>& data, const FitOptions& options) {
  std::size_t minus = 0, plus = 0;
  for (const auto& p : data) {
    if (!(std::isfinite(p.ib) && std::isfinite(p.freq) && p.freq > 0.0))
      fail(ErrorCode::InvalidArgument, "fit_spectrum: points need finite bias and positive frequency");
    if (!(p.weight >= 0.0 && std::isfinite(p.weight)))
      fail(ErrorCode::InvalidArgument, "fit_spectrum: weights must be >= 0");
    if (p.weight > 0.0) (p.branch == Branch::Minus ? minus : plus)++;
  }
  if (minus + plus < options.min_points) {
    std::ostringstream msg;
    msg << "fit_spectrum: " << minus + plus << " weighted points, need at least " << options.min_points;
    fail(ErrorCode::InvalidArgument, msg.str());
  }
  if (options.require_both_branches && (minus == 0 || plus == 0))
    fail(ErrorCode::InvalidArgument, "fit_spectrum: both branches must be represented");
}

}  // namespace

FitResult fit_spectrum(const std::vector<SpectroscopyPoint>& data, const DeviceModel& init,
                       const FitOptions& options) {
  init.validate();
  check_data(data, options);
  const ParamBounds bounds = options.bounds ? *options.bounds : default_bounds(init, data);

  FitProblem prob;
  prob.data = &data;
  prob.a1 = init.a1;
  prob.model = options.model;
  prob.frozen = init.to_array();
  for (int i = 0; i < static_cast<int>(kParamCount); ++i)
    if (options.free[i]) prob.free_index.push_back(i);
  const auto n_free = static_cast<Eigen::Index>(prob.free_index.size());
  if (n_free == 0) fail(ErrorCode::InvalidArgument, "fit_spectrum: no free parameters");

  Eigen::VectorXd x(n_free), lo(n_free), hi(n_free);
  for (Eigen::Index k = 0; k < n_free; ++k) {
    const int i = prob.free_index[k];
    x(k) = prob.frozen[i] / kScales[i];
    lo(k) = bounds.lower[i] / kScales[i];
    hi(k) = bounds.upper[i] / kScales[i];
    if (!(lo(k) <= hi(k))) fail(ErrorCode::InvalidArgument, std::string("fit_spectrum: empty bounds for ") + kNames[i]);
  }

  double span = 0.0;
  for (const auto& p : data) span = std::max(span, std::abs(p.ib - init.i0));
  std::vector<double> stages{1.0};
  if (options.continuation) stages = {0.125, 0.25, 0.5, 1.0};

  FitResult result;
  result.initial = init;
  result.free = options.free;
  LmResult lm;
  const ResidualFn fn = [&prob](const Eigen::VectorXd& v, Eigen::VectorXd& r) { prob.residuals(v, r); };

  for (std::size_t s = 0; s < stages.size(); ++s) {
    const bool last = s + 1 == stages.size();
    // the dark-mode mask is frozen while the optimizer runs and refreshed
    // between passes
    std::vector<std::size_t> previous;
    for (int pass = 0; pass < 4; ++pass) {
      const DeviceModel current = prob.unpack(x);
      const double window = stages[s] * span;
      prob.used.clear();
      std::size_t masked = 0;
      for (std::size_t i = 0; i < data.size(); ++i) {
        const auto& p = data[i];
        if (p.weight <= 0.0) continue;
        if (!last && std::abs(p.ib - current.i0) > window) continue;
        if (p.branch == Branch::Plus && !forward_mode(current, p.ib, options.model).plus_visible) {
          ++masked;
          continue;
        }
        prob.used.push_back(i);
      }
      result.points_masked = masked;
      if (!last && prob.used.size() < static_cast<std::size_t>(n_free) + 10) break;
      if (pass > 0 && prob.used == previous) break;
      previous = prob.used;

      LmOptions lmo = options.lm;
      lmo.max_iterations = std::max(1, options.lm.max_iterations - result.iterations);
      lm = levenberg_marquardt(fn, x, lo, hi, lmo);
      x = lm.x;
      result.iterations += lm.iterations;
      if (last && !lm.converged) {
        std::ostringstream msg;
        msg << "fit_spectrum: iteration cap " << options.lm.max_iterations << " reached, rms residual "
            << std::sqrt(2.0 * lm.cost / std::max<double>(1.0, static_cast<double>(prob.used.size()))) *
                   kResidualUnit
            << " Hz";
        fail(ErrorCode::NonConvergence, msg.str());
      }
      if (result.iterations >= options.lm.max_iterations && !last) break;
    }
  }

  if (prob.used.size() <= static_cast<std::size_t>(n_free))
    fail(ErrorCode::InvalidArgument, "fit_spectrum: fewer usable points than free parameters");

  result.params = prob.unpack(x);
  result.converged = lm.converged;
  result.cost = lm.cost;
  result.points_used = prob.used.size();
  double wsum = 0.0;
  for (std::size_t i : prob.used) wsum += data[i].weight;
  result.residual_rms = std::sqrt(2.0 * lm.cost / wsum) * kResidualUnit;

  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(lm.jacobian, Eigen::ComputeThinV);
  const Eigen::VectorXd sv = svd.singularValues();
  result.singular_values.assign(sv.data(), sv.data() + sv.size());
  const auto m = static_cast<double>(prob.used.size());
  const double s2 = 2.0 * lm.cost / (m - static_cast<double>(n_free));
  Eigen::VectorXd inv_sq = Eigen::VectorXd::Zero(sv.size());
  for (Eigen::Index k = 0; k < sv.size(); ++k)
    if (sv(k) > 1e-12 * sv(0)) inv_sq(k) = 1.0 / (sv(k) * sv(k));
  const Eigen::MatrixXd cov_scaled = s2 * svd.matrixV() * inv_sq.asDiagonal() * svd.matrixV().transpose();
  for (Eigen::Index a = 0; a < n_free; ++a)
    for (Eigen::Index b = 0; b < n_free; ++b) {
      const int i = prob.free_index[a], j = prob.free_index[b];
      result.covariance[i * kParamCount + j] = cov_scaled(a, b) * kScales[i] * kScales[j];
    }
  for (std::size_t i = 0; i < kParamCount; ++i)
    result.sigma[i] = std::sqrt(std::max(0.0, result.covariance[i * kParamCount + i]));

  for (Eigen::Index k = 0; k < n_free; ++k) {
    const double width = hi(k) - lo(k);
    if (x(k) - lo(k) <= 1e-9 * width || hi(k) - x(k) <= 1e-9 * width)
      result.at_bound.push_back(static_cast<Param>(prob.free_index[k]));
  }
  result.boundary_optimum = !result.at_bound.empty();
  return result;
}

std::pair<double, double> offset_field(const FitResult& fit) {
  const DeviceModel& m = fit.params;
  const double b = kFluxQuantum / (m.ip * m.a1);
  const double b0 = b * m.i0;
  const double d_i0 = b;
  const double d_ip = -b0 / m.ip;
  const double var = d_i0 * d_i0 * fit.cov(Param::I0, Param::I0) + d_ip * d_ip * fit.cov(Param::Ip, Param::Ip) +
                     2.0 * d_i0 * d_ip * fit.cov(Param::I0, Param::Ip);
  return {b0, std::sqrt(std::max(0.0, var))};
}

DerivedQuantities derived_quantities(const DeviceModel& model) {
  DerivedQuantities d;
  d.energies = derived_energies(model.circuit());
  d.b = kFluxQuantum / (model.ip * model.a1);
  d.b0 = d.b * model.i0;
  d.bc = d.b * model.ibc;
  return d;
}

DerivedQuantities derived_quantities(const FitResult& fit) {
  DerivedQuantities d = derived_quantities(fit.params);
  std::tie(d.b0, d.b0_sigma) = offset_field(fit);
  return d;
}

namespace {

struct Scorer {
  const DeviceModel& model;
  const FluxObservation& obs;
  const ModelOptions& options;

  double operator()(double phi1) const {
    const ModePair m = forward_mode_at_flux(model, phi1, options);
    double s = (m.f_minus - obs.f_minus) * (m.f_minus - obs.f_minus);
    if (obs.f_plus) s += (m.f_plus - *obs.f_plus) * (m.f_plus - *obs.f_plus);
    return s;
  }
};

// Golden-section search for a minimum bracketed by [a, b].
std::pair<double, double> golden_min(const Scorer& f, double a, double b) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > 1e-11 * std::max(1.0, std::abs(a))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  const double x = fc < fd ? c : d;
  return {x, std::min(fc, fd)};
}

}  // namespace

std::vector<FluxCandidate> invert_flux(const DeviceModel& model, const FluxObservation& obs,
                                       const InvertOptions& options) {
  model.validate();
  if (!(obs.f_minus > 0.0 && std::isfinite(obs.f_minus)))
    fail(ErrorCode::InvalidArgument, "invert_flux: f_minus must be > 0");
  if (obs.f_plus && !(*obs.f_plus > 0.0)) fail(ErrorCode::InvalidArgument, "invert_flux: f_plus must be > 0");
  if (!(options.tol > 0.0)) fail(ErrorCode::InvalidArgument, "invert_flux: tol must be > 0");
  if (!(options.grid_step > 0.0)) fail(ErrorCode::InvalidArgument, "invert_flux: grid step must be > 0");

  double lo = 0.0, hi = 0.0;
  if (options.window) {
    std::tie(lo, hi) = *options.window;
    if (!(lo < hi)) fail(ErrorCode::InvalidArgument, "invert_flux: empty window");
  } else {
    double half = 0.0;
    try {
      half = 0.5 * static_cast<double>(
                       modulation_period(model.r, options.period_tol, options.period_max_denominator).period_phi0);
    } catch (const Error&) {
      half = 0.5 * static_cast<double>(options.period_max_denominator);
    }
    if (options.model.gap_suppression) half = std::min(half, 0.999 * model.ibc / model.ip);
    hi = half;
    lo = obs.minus_slope ? -half : 0.0;
  }

  const Scorer score{model, obs, options.model};
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / options.grid_step)) + 1;
  const double step = (hi - lo) / static_cast<double>(n - 1);
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) grid[i] = score(lo + step * static_cast<double>(i));

  const double tol2 = options.tol * options.tol;
  std::vector<FluxCandidate> found;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || grid[i] <= grid[i - 1];
    const bool right_ok = i + 1 == n || grid[i] <= grid[i + 1];
    if (!(left_ok && right_ok)) continue;
    const double a = lo + step * static_cast<double>(i == 0 ? 0 : i - 1);
    const double b = lo + step * static_cast<double>(i + 1 == n ? n - 1 : i + 1);
    auto [phi, s] = golden_min(score, a, b);
    if (grid[i] < s) {
      phi = lo + step * static_cast<double>(i);
      s = grid[i];
    }
    best = std::min(best, s);
    if (s > tol2) continue;
    if (obs.minus_slope && *obs.minus_slope != 0.0) {
      const double h = 1e-4;
      const double p_hi = std::min(phi + h, hi), p_lo = std::max(phi - h, lo);
      const double slope = (forward_mode_at_flux(model, p_hi, options.model).f_minus -
                            forward_mode_at_flux(model, p_lo, options.model).f_minus) /
                           (p_hi - p_lo);
      const bool flat = std::abs(slope) <= 1e-3 * std::abs(*obs.minus_slope);
      if (!flat && (slope > 0.0) != (*obs.minus_slope > 0.0)) continue;
      if (options.slope_rel_tol &&
          std::abs(slope - *obs.minus_slope) > *options.slope_rel_tol * std::abs(*obs.minus_slope))
        continue;
    }
    FluxCandidate c;
    c.phi1 = phi;
    c.residual = std::sqrt(s);
    found.push_back(c);
  }

  std::sort(found.begin(), found.end(), [](const auto& x, const auto& y) { return x.phi1 < y.phi1; });
  std::vector<FluxCandidate> merged;
  for (const auto& c : found) {
    if (!merged.empty() && c.phi1 - merged.back().phi1 <= options.merge_distance) {
      if (c.residual < merged.back().residual) merged.back() = c;
      continue;
    }
    merged.push_back(c);
  }

  if (merged.empty()) {
    std::ostringstream msg;
    msg << "invert_flux: no flux in [" << lo << ", " << hi << "] Phi0 matches within " << options.tol
        << " Hz (best mismatch " << std::sqrt(best) << " Hz)";
    fail(ErrorCode::NoCandidate, msg.str());
  }
  const FieldCalibration cal = model.calibration();
  for (auto& c : merged) {
    c.phi2 = model.r * c.phi1;
    c.field = field_from_bias(cal, model.bias_at(c.phi1));
    c.unique = merged.size() == 1;
    c.mirror_ambiguous = !obs.minus_slope && std::abs(c.phi1) > options.merge_distance;
  }
  return merged;
}

}  // namespace sqmag
