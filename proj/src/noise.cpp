#include "sqmag/noise.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "fft.hpp"
#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"

namespace sqmag {

void ComplexTrace::validate() const {
  if (!(dt > 0.0 && std::isfinite(dt))) fail(ErrorCode::InvalidArgument, "ComplexTrace: dt must be > 0");
  if (samples.size() < 2) fail(ErrorCode::InvalidArgument, "ComplexTrace: need at least 2 samples");
}

const char* density_unit_name(DensityUnit u) {
  switch (u) {
    case DensityUnit::HertzPerRootHz: return "Hz/sqrt(Hz)";
    case DensityUnit::FluxQuantaPerRootHz: return "Phi0/sqrt(Hz)";
    case DensityUnit::TeslaPerRootHz: return "T/sqrt(Hz)";
  }
  return "?";
}

double NoiseModel::flicker(double f) const { return a / std::pow(f, alpha); }

double NoiseModel::telegraph(double f) const {
  const double w = kTwoPi * f;
  return b_rtn * gamma_rtn * gamma_rtn / (w * w + gamma_rtn * gamma_rtn);
}

double NoiseModel::psd(double f) const { return flicker(f) + telegraph(f) + s0; }

// ---------------------------------------------------------------------------
// S11 -> frequency

namespace {

struct Locus {
  std::vector<double> delta;
  std::vector<std::complex<double>> point;
  // blocks of consecutive points with a bounding circle each
  static constexpr std::size_t kBlock = 64;
  std::vector<std::complex<double>> block_center;
  std::vector<double> block_radius;

  Locus(const ResonanceParams& res, double rabi, const ExtractOptions& o) {
    const auto n = static_cast<std::size_t>(o.grid_points);
    const double half = o.span_gamma2 * res.gamma2();
    delta.resize(n);
    point.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
      delta[j] = -half + 2.0 * half * static_cast<double>(j) / static_cast<double>(n - 1);
      point[j] = reflection(res, delta[j], rabi);
    }
    for (std::size_t s = 0; s < n; s += kBlock) {
      const std::size_t e = std::min(n, s + kBlock);
      std::complex<double> c = 0.0;
      for (std::size_t j = s; j < e; ++j) c += point[j];
      c /= static_cast<double>(e - s);
      double r = 0.0;
      for (std::size_t j = s; j < e; ++j) r = std::max(r, std::abs(point[j] - c));
      block_center.push_back(c);
      block_radius.push_back(r);
    }
  }

  // exact nearest grid point; blocks whose bounding circle cannot beat the
  // current best are skipped
  std::size_t nearest(std::complex<double> z, std::vector<std::pair<double, std::size_t>>& order) const {
    order.clear();
    for (std::size_t b = 0; b < block_center.size(); ++b)
      order.emplace_back(std::max(0.0, std::abs(z - block_center[b]) - block_radius[b]), b);
    std::sort(order.begin(), order.end());
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_j = 0;
    for (const auto& [bound, b] : order) {
      if (bound * bound > best) break;
      const std::size_t s = b * kBlock, e = std::min(point.size(), s + kBlock);
      for (std::size_t j = s; j < e; ++j) {
        const double d = std::norm(z - point[j]);
        if (d < best) {
          best = d;
          best_j = j;
        }
      }
    }
    return best_j;
  }
};

// vertex of the parabola through (x - h, y0), (x, y1), (x + h, y2)
double parabola_vertex(double x, double h, double y0, double y1, double y2) {
  const double denom = y0 - 2.0 * y1 + y2;
  if (!(denom > 0.0)) return x;
  const double shift = 0.5 * h * (y0 - y2) / denom;
  return x + std::clamp(shift, -h, h);
}

}  // namespace

FrequencyTrace extract_frequency_trace(const ComplexTrace& trace, const ResonanceParams& res, double rabi,
                                       const ExtractOptions& options) {
  trace.validate();
  res.validate();
  if (options.grid_points < 3) fail(ErrorCode::InvalidArgument, "extract_frequency_trace: grid too small");
  if (!(options.span_gamma2 > 0.0)) fail(ErrorCode::InvalidArgument, "extract_frequency_trace: span must be > 0");
  const Locus locus(res, rabi, options);
  const std::size_t m = locus.delta.size();
  const double h0 = locus.delta[1] - locus.delta[0];
  const double lo = locus.delta.front(), hi = locus.delta.back();

  FrequencyTrace out;
  out.dt = trace.dt;
  out.samples.resize(trace.samples.size());
  out.off_curve.assign(trace.samples.size(), 0);
  std::vector<std::pair<double, std::size_t>> order;
  for (std::size_t i = 0; i < trace.samples.size(); ++i) {
    const std::complex<double> z = trace.samples[i];
    const std::size_t j = locus.nearest(z, order);
    double best = locus.delta[j];
    if (j > 0 && j + 1 < m) {
      best = parabola_vertex(best, h0, std::norm(z - locus.point[j - 1]), std::norm(z - locus.point[j]),
                             std::norm(z - locus.point[j + 1]));
    }
    double h = h0;
    for (int pass = 0; pass < options.refine_passes; ++pass) {
      h *= 0.25;
      const double x = std::clamp(best, lo + h, hi - h);
      best = parabola_vertex(x, h, std::norm(z - reflection(res, x - h, rabi)), std::norm(z - reflection(res, x, rabi)),
                             std::norm(z - reflection(res, x + h, rabi)));
    }
    best = std::clamp(best, lo, hi);
    if (std::abs(z - reflection(res, best, rabi)) > options.off_curve_threshold) {
      out.off_curve[i] = 1;
      ++out.off_curve_count;
    }
    out.samples[i] = trace.f_drive - best / kTwoPi;
  }
  return out;
}

ComplexTrace reflect_trace(const FrequencyTrace& freq, const ResonanceParams& res, double f_drive,
                           double rabi, double p_in_dbm) {
  ComplexTrace out;
  out.dt = freq.dt;
  out.f_drive = f_drive;
  out.p_in_dbm = p_in_dbm;
  out.samples.reserve(freq.samples.size());
  for (double f : freq.samples) out.samples.push_back(reflection(res, kTwoPi * (f_drive - f), rabi));
  return out;
}

// ---------------------------------------------------------------------------
// spectra

SpectralDensity frequency_asd(const FrequencyTrace& trace) {
  const std::size_t n = trace.samples.size();
  if (n < 2) fail(ErrorCode::InvalidArgument, "frequency_asd: need at least 2 samples");
  if (!(trace.dt > 0.0)) fail(ErrorCode::InvalidArgument, "frequency_asd: dt must be > 0");
  const auto spectrum = detail::real_dft(trace.samples);
  const double t = trace.duration();
  SpectralDensity sd;
  sd.unit = DensityUnit::HertzPerRootHz;
  sd.bandwidth = 1.0 / (2.0 * t);
  sd.averages = 1;
  const double inv_n = 1.0 / static_cast<double>(n);
  const double root_bw = std::sqrt(sd.bandwidth);
  for (std::size_t k = 1; k <= n / 2; ++k) {
    const double mag = std::abs(spectrum[k]) * inv_n;
    const bool nyquist = n % 2 == 0 && k == n / 2;
    sd.freqs.push_back(static_cast<double>(k) / t);
    sd.amplitude.push_back(nyquist ? mag / std::sqrt(2.0 * sd.bandwidth) : mag / root_bw);
  }
  return sd;
}

SpectralDensity flux_asd(const FrequencyTrace& trace, double responsivity) {
  if (!(std::isfinite(responsivity) && responsivity != 0.0))
    fail(ErrorCode::ZeroResponsivity, "flux_asd: responsivity must be nonzero");
  SpectralDensity sd = frequency_asd(trace);
  const double inv = 1.0 / std::abs(responsivity);
  for (double& a : sd.amplitude) a *= inv;
  sd.unit = DensityUnit::FluxQuantaPerRootHz;
  return sd;
}

SpectralDensity field_asd(const SpectralDensity& sphi, double area) {
  if (!(area > 0.0)) fail(ErrorCode::InvalidArgument, "field_asd: area must be > 0");
  if (sphi.unit != DensityUnit::FluxQuantaPerRootHz)
    fail(ErrorCode::InvalidArgument, "field_asd: input must be in Phi0/sqrt(Hz)");
  SpectralDensity sb = sphi;
  const double factor = kFluxQuantum / area;
  for (double& a : sb.amplitude) a *= factor;
  sb.unit = DensityUnit::TeslaPerRootHz;
  return sb;
}

SpectralDensity average_densities(const std::vector<SpectralDensity>& densities) {
  if (densities.empty()) fail(ErrorCode::InvalidArgument, "average_densities: nothing to average");
  const SpectralDensity& first = densities.front();
  SpectralDensity out = first;
  std::vector<double> power(first.amplitude.size(), 0.0);
  std::size_t total = 0;
  for (const auto& d : densities) {
    if (d.freqs.size() != first.freqs.size() || d.unit != first.unit ||
        std::abs(d.bandwidth - first.bandwidth) > 1e-9 * first.bandwidth)
      fail(ErrorCode::InvalidArgument, "average_densities: densities are on different grids or units");
    const double w = static_cast<double>(std::max<std::size_t>(d.averages, 1));
    for (std::size_t k = 0; k < power.size(); ++k) power[k] += w * d.amplitude[k] * d.amplitude[k];
    total += std::max<std::size_t>(d.averages, 1);
  }
  for (std::size_t k = 0; k < power.size(); ++k) out.amplitude[k] = std::sqrt(power[k] / static_cast<double>(total));
  out.averages = total;
  return out;
}

// ---------------------------------------------------------------------------
// responsivity

double responsivity_unchecked(const DeviceModel& model, double phi1, const ModelOptions& options, double step) {
  const double up = forward_mode_at_flux(model, phi1 + step, options).f_minus;
  const double down = forward_mode_at_flux(model, phi1 - step, options).f_minus;
  return (up - down) / (2.0 * step);
}

double responsivity(const DeviceModel& model, double phi1, const ModelOptions& options, double step) {
  if (!(step > 0.0)) fail(ErrorCode::InvalidArgument, "responsivity: step must be > 0");
  const double f = forward_mode_at_flux(model, phi1, options).f_minus;
  const double r = responsivity_unchecked(model, phi1, options, step);
  const double r_half = responsivity_unchecked(model, phi1, options, 0.5 * step);
  if (std::abs(r) <= 1e-6 * f || std::abs(r_half) <= 1e-6 * f) {
    std::ostringstream msg;
    msg << "responsivity: stationary point at phi1 = " << phi1 << " (slope " << r << " Hz/Phi0)";
    fail(ErrorCode::ZeroResponsivity, msg.str());
  }
  if (std::abs(r - r_half) > 1e-4 * std::abs(r_half)) {
    std::ostringstream msg;
    msg << "responsivity: finite differences disagree at phi1 = " << phi1 << " (" << r << " vs " << r_half << ")";
    fail(ErrorCode::NonConvergence, msg.str());
  }
  return r;
}

// ---------------------------------------------------------------------------
// noise model fit

namespace {

// E[ln(mean of K unit exponentials)] = psi(K) - ln K
double log_periodogram_bias(std::size_t k) {
  if (k == 0) return 0.0;
  constexpr double euler_gamma = 0.57721566490153286;
  double psi = -euler_gamma;
  for (std::size_t j = 1; j < k; ++j) psi += 1.0 / static_cast<double>(j);
  return psi - std::log(static_cast<double>(k));
}

constexpr double kMinAlpha = 0.2;
constexpr double kMaxAlpha = 4.0;

NoiseModel unpack_noise(const Eigen::VectorXd& p) {
  return {std::exp(p(0)), p(1), std::exp(p(2)), std::exp(p(3)), std::exp(p(4))};
}

double median(std::vector<double> v) {
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2), v.end());
  return v[v.size() / 2];
}

// x with P(chi^2_k > x) = p, k = 1 or 2
double chi2_survival_inverse(int k, double p) {
  if (k == 2) return -2.0 * std::log(p);
  double lo = 0.0, hi = 200.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(std::sqrt(0.5 * mid)) > p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double crossing(const std::function<double(double)>& g, double f_lo, double f_hi) {
  const int n = 400;
  double prev_f = f_lo, prev = g(f_lo);
  for (int i = 1; i <= n; ++i) {
    const double f = f_lo * std::pow(f_hi / f_lo, static_cast<double>(i) / n);
    const double v = g(f);
    if ((v > 0.0) != (prev > 0.0)) {
      double a = prev_f, b = f, ga = prev;
      for (int it = 0; it < 100; ++it) {
        const double mid = std::sqrt(a * b);
        const double gm = g(mid);
        if ((gm > 0.0) == (ga > 0.0)) {
          a = mid;
          ga = gm;
        } else {
          b = mid;
        }
      }
      return std::sqrt(a * b);
    }
    prev_f = f;
    prev = v;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

NoiseFit fit_noise_model(const SpectralDensity& sd, const NoiseFitOptions& options) {
  const std::size_t n = sd.freqs.size();
  if (n != sd.amplitude.size()) fail(ErrorCode::InvalidArgument, "fit_noise_model: size mismatch");
  if (n < 6) fail(ErrorCode::InvalidArgument, "fit_noise_model: need at least 6 bins");
  for (std::size_t k = 0; k < n; ++k) {
    if (!(sd.freqs[k] > 0.0) || !(sd.amplitude[k] > 0.0) || !std::isfinite(sd.amplitude[k]))
      fail(ErrorCode::InvalidArgument, "fit_noise_model: frequencies and amplitudes must be > 0");
    if (k > 0 && !(sd.freqs[k] > sd.freqs[k - 1]))
      fail(ErrorCode::InvalidArgument, "fit_noise_model: frequencies must increase");
  }
  const double f_min = sd.freqs.front(), f_max = sd.freqs.back();
  const double decades = std::log10(f_max / f_min);
  if (n < 100 && decades < 3.0) {
    std::ostringstream msg;
    msg << "fit_noise_model: " << n << " bins over " << decades << " decades; need >= 100 bins or >= 3 decades";
    fail(ErrorCode::InvalidArgument, msg.str());
  }

  const double bias = log_periodogram_bias(sd.averages);
  Eigen::VectorXd log_s(static_cast<Eigen::Index>(n)), log_f(static_cast<Eigen::Index>(n));
  std::vector<double> power(n);
  for (std::size_t k = 0; k < n; ++k) {
    power[k] = sd.amplitude[k] * sd.amplitude[k];
    log_s(static_cast<Eigen::Index>(k)) = std::log(power[k]) - bias;
    log_f(static_cast<Eigen::Index>(k)) = std::log(sd.freqs[k]);
  }

  auto residual = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
    const NoiseModel m = unpack_noise(p);
    r.resize(static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      const auto i = static_cast<Eigen::Index>(k);
      const double f = sd.freqs[k];
      const double w = kTwoPi * f;
      const double flick = std::exp(p(0) - p(1) * log_f(i));
      const double tele = m.b_rtn * m.gamma_rtn * m.gamma_rtn / (w * w + m.gamma_rtn * m.gamma_rtn);
      r(i) = std::log(flick + tele + m.s0) - log_s(i);
    }
  };

  const double s_max = *std::max_element(power.begin(), power.end());
  const double s_min = *std::min_element(power.begin(), power.end());
  const double ln_floor = std::log(s_min) - 50.0;
  const double ln_ceil = std::log(s_max) + 20.0;
  Eigen::VectorXd lower(5), upper(5);
  // a corner outside the band, or a nearly flat flicker term, would just
  // imitate one of the other terms
  lower << ln_floor, kMinAlpha, ln_floor, std::log(kTwoPi * f_min), std::log(s_min) - 40.0;
  upper << ln_ceil + 10.0, kMaxAlpha, ln_ceil, std::log(kTwoPi * f_max), std::log(s_max) + 5.0;

  // white floor from the top fifth of the band, low-frequency level from the bottom bins
  std::vector<double> top(power.end() - static_cast<std::ptrdiff_t>(std::max<std::size_t>(n / 5, 1)), power.end());
  const double s0_guess = median(top) * std::exp(-bias);
  std::vector<double> bottom(power.begin(), power.begin() + static_cast<std::ptrdiff_t>(std::max<std::size_t>(n / 50, 3)));
  const double low_guess = median(bottom) * std::exp(-bias);

  LmOptions lm_options = options.lm;
  lm_options.abs_cost_tol =
      std::max(lm_options.abs_cost_tol, 0.5 * static_cast<double>(n) * options.exact_rms * options.exact_rms);

  NoiseFit best;
  double best_cost = std::numeric_limits<double>::infinity();
  LmResult best_lm;
  const int starts = std::max(1, options.gamma_starts);
  for (int s = 0; s < starts; ++s) {
    const double f_gamma = f_min * std::pow(f_max / f_min, (s + 0.5) / starts);
    Eigen::VectorXd p0(5);
    const double f_ref = sd.freqs[std::min<std::size_t>(n - 1, n / 100)];
    p0 << std::log(std::max(low_guess - s0_guess, s0_guess) * 0.5) + 1.0 * std::log(f_ref), 1.0,
        std::log(std::max(low_guess, s0_guess)), std::log(kTwoPi * f_gamma), std::log(s0_guess);
    p0 = p0.cwiseMax(lower).cwiseMin(upper);
    const LmResult lm = levenberg_marquardt(residual, p0, lower, upper, lm_options);
    if (lm.cost < best_cost) {
      best_cost = lm.cost;
      best_lm = lm;
    }
  }
  best.model = unpack_noise(best_lm.x);
  best.converged = best_lm.converged;
  best.iterations = best_lm.iterations;
  best.residual_rms = std::sqrt(2.0 * best_cost / static_cast<double>(n));
  if (!best.converged) fail(ErrorCode::NonConvergence, "fit_noise_model: iteration cap reached");

  double share_f = 0.0, share_t = 0.0, share_w = 0.0;
  for (double f : sd.freqs) {
    const double total = best.model.psd(f);
    share_f = std::max(share_f, best.model.flicker(f) / total);
    share_t = std::max(share_t, best.model.telegraph(f) / total);
    share_w = std::max(share_w, best.model.s0 / total);
  }

  // refit the amplitudes with one term pinned at its floor and both shape
  // parameters held; a small rise in chi^2 means the data do not need the term
  const double dof = static_cast<double>(n) - 5.0;
  const double sigma2 = std::max(2.0 * best_cost / dof, options.exact_rms * options.exact_rms);
  auto needless = [&](Eigen::Index amplitude, int removed) {
    Eigen::VectorXd lo = lower, hi = upper, x = best_lm.x;
    x(amplitude) = hi(amplitude) = lower(amplitude);
    lo(1) = hi(1) = x(1);
    lo(3) = hi(3) = x(3);
    double without = std::numeric_limits<double>::infinity();
    try {
      without = levenberg_marquardt(residual, x, lo, hi, lm_options).cost;
    } catch (const Error&) {
    }
    const double delta_chi2 = 2.0 * std::max(0.0, without - best_cost) / sigma2;
    return delta_chi2 < chi2_survival_inverse(removed, options.degenerate_p);
  };
  best.flicker_degenerate = share_f < options.degenerate_share || needless(0, 2);
  best.telegraph_degenerate = share_t < options.degenerate_share || needless(2, 2);
  best.white_degenerate = share_w < options.degenerate_share || needless(4, 1);

  const NoiseModel& m = best.model;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  best.crossover_flicker_white = m.s0 > 0.0 ? std::pow(m.a / m.s0, 1.0 / m.alpha) : nan;
  best.crossover_telegraph_white = m.b_rtn > m.s0 ? m.gamma_rtn / kTwoPi * std::sqrt(m.b_rtn / m.s0 - 1.0) : nan;
  best.crossover_flicker_telegraph =
      crossing([&m](double f) { return std::log(m.flicker(f)) - std::log(m.telegraph(f)); }, f_min / 1e3, f_max * 1e3);
  return best;
}

// ---------------------------------------------------------------------------
// synthesis

FrequencyTrace synthesize_trace(const NoiseModel& model, double f_center, double duration, double dt,
                                std::uint64_t seed, const SynthOptions& options) {
  if (!(dt > 0.0 && duration > 0.0)) fail(ErrorCode::InvalidArgument, "synthesize_trace: dt and duration must be > 0");
  if (duration < 100.0 * dt) fail(ErrorCode::InvalidArgument, "synthesize_trace: duration must be >= 100 dt");
  if (!(model.a >= 0.0 && model.b_rtn >= 0.0 && model.s0 >= 0.0 && model.gamma_rtn >= 0.0 && model.alpha > 0.0))
    fail(ErrorCode::InvalidArgument, "synthesize_trace: invalid noise model");
  const auto n = static_cast<std::size_t>(std::llround(duration / dt));
  const double t = static_cast<double>(n) * dt;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  FrequencyTrace out;
  out.dt = dt;
  out.samples.assign(n, f_center);
  out.off_curve.assign(n, 0);

  if (model.s0 > 0.0) {
    const double sigma = std::sqrt(model.s0 / (2.0 * dt));
    for (double& x : out.samples) x += sigma * gauss(rng);
  }

  if (model.a > 0.0) {
    // E|X_k|^2 = S(f_k) BW on interior bins of the 1/N-normalized DFT
    std::vector<std::complex<double>> half(n / 2 + 1, 0.0);
    for (std::size_t k = 1; k <= n / 2; ++k) {
      const double s = model.flicker(static_cast<double>(k) / t);
      if (n % 2 == 0 && k == n / 2) {
        half[k] = std::sqrt(s / t) * gauss(rng);
      } else {
        const double scale = std::sqrt(s / (4.0 * t));
        const double re = gauss(rng), im = gauss(rng);
        half[k] = std::complex<double>(scale * re, scale * im);
      }
    }
    const std::vector<double> shaped = detail::real_idft(half, n);
    for (std::size_t i = 0; i < n; ++i) out.samples[i] += shaped[i];
  }

  double splitting = options.rtn_splitting;
  if (splitting <= 0.0 && model.b_rtn > 0.0 && model.gamma_rtn > 0.0)
    splitting = 2.0 * std::sqrt(model.b_rtn * model.gamma_rtn / 4.0);
  if (splitting > 0.0 && model.gamma_rtn > 0.0) {
    const double leave_rate = 0.5 * model.gamma_rtn;
    std::exponential_distribution<double> dwell(leave_rate);
    double level = std::bernoulli_distribution(0.5)(rng) ? 0.5 : -0.5;
    double next_switch = dwell(rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double time = static_cast<double>(i) * dt;
      while (time >= next_switch) {
        level = -level;
        next_switch += dwell(rng);
      }
      out.samples[i] += splitting * level;
    }
  }
  return out;
}

}  // namespace sqmag
