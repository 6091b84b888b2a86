#include "sqmag/sqmag.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <limits>
#include <memory>
#include <new>
#include <random>
#include <string>

#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"
#include "sqmag/io.hpp"

using namespace sqmag;

struct sqmag_device {
  ParamFile p;
};
struct sqmag_sweep {
  std::vector<SpectroscopyPoint> points;
};
struct sqmag_fit {
  FitResult result;
  ParamFile init;
};
struct sqmag_candidates {
  std::vector<FluxCandidate> list;
};
struct sqmag_trace {
  TraceFile t;
};
struct sqmag_spectrum {
  SpectralDensity sphi;
  SpectralDensity sb;
  double area = 0.0;
  double responsivity = std::numeric_limits<double>::quiet_NaN();
  std::size_t off_curve = 0;
};

namespace {

thread_local std::string g_last_error;

template <class F>
sqmag_status guarded(F&& f) {
  try {
    g_last_error.clear();
    f();
    return SQMAG_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return static_cast<sqmag_status>(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return SQMAG_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SQMAG_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return SQMAG_ERR_INTERNAL;
  }
}

template <class T>
void need(const T* ptr, const char* what) {
  if (ptr == nullptr) fail(ErrorCode::InvalidArgument, std::string(what) + " must not be null");
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out == nullptr) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

ModelOptions model_options(const ParamFile& p) {
  ModelOptions o;
  o.gap_suppression = p.gap_suppression;
  return o;
}

void check_param(sqmag_param p) {
  if (static_cast<int>(p) < 0 || static_cast<int>(p) >= SQMAG_PARAM_COUNT)
    fail(ErrorCode::InvalidArgument, "parameter index out of range");
}

const ResonanceParams& resonance_of(const ParamFile& p) {
  if (!p.resonance) fail(ErrorCode::InvalidArgument, "param file has no resonance section");
  return *p.resonance;
}

double rabi_for(const ParamFile& p, double f_drive, double p_in_dbm) {
  const ResonanceParams& res = resonance_of(p);
  if (p.rabi) return *p.rabi;
  if (p.attenuation_db) {
    DriveSettings d;
    d.f_drive = f_drive;
    d.p_in_dbm = p_in_dbm;
    d.attenuation_db = *p.attenuation_db;
    return rabi_from_power(d, res);
  }
  fail(ErrorCode::InvalidArgument, "resonance section needs rabi_2pi_MHz or attenuation_dB for S11 traces");
}

void fill(const NoiseFit& f, sqmag_noise_result* out) {
  out->model = {f.model.a, f.model.alpha, f.model.b_rtn, f.model.gamma_rtn, f.model.s0};
  out->residual_rms = f.residual_rms;
  out->converged = f.converged;
  out->iterations = f.iterations;
  out->flicker_degenerate = f.flicker_degenerate;
  out->telegraph_degenerate = f.telegraph_degenerate;
  out->white_degenerate = f.white_degenerate;
  out->crossover_flicker_white = f.crossover_flicker_white;
  out->crossover_telegraph_white = f.crossover_telegraph_white;
  out->crossover_flicker_telegraph = f.crossover_flicker_telegraph;
}

}  // namespace

extern "C" {

const char* sqmag_status_string(sqmag_status status) {
  if (status == SQMAG_OK) return "ok";
  return error_code_name(static_cast<ErrorCode>(status));
}

const char* sqmag_last_error(void) { return g_last_error.c_str(); }

const char* sqmag_param_name(sqmag_param p) {
  if (static_cast<int>(p) < 0 || static_cast<int>(p) >= SQMAG_PARAM_COUNT) return "";
  return param_name(static_cast<Param>(p));
}

const char* sqmag_param_unit(sqmag_param p) {
  if (static_cast<int>(p) < 0 || static_cast<int>(p) >= SQMAG_PARAM_COUNT) return "";
  return param_unit(static_cast<Param>(p));
}

double sqmag_param_scale(sqmag_param p) {
  if (static_cast<int>(p) < 0 || static_cast<int>(p) >= SQMAG_PARAM_COUNT)
    return std::numeric_limits<double>::quiet_NaN();
  return param_scale(static_cast<Param>(p));
}

void sqmag_string_free(char* s) { std::free(s); }

// ---- device

sqmag_status sqmag_device_load(const char* path, sqmag_device** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new sqmag_device{parse_param_json(read_text_file(path))};
  });
}

sqmag_status sqmag_device_parse(const char* json_text, sqmag_device** out) {
  return guarded([&] {
    need(json_text, "json_text");
    need(out, "out");
    *out = new sqmag_device{parse_param_json(json_text)};
  });
}

sqmag_status sqmag_device_save(const sqmag_device* dev, const char* path) {
  return guarded([&] {
    need(dev, "device");
    need(path, "path");
    write_text_file(path, format_param_json(dev->p));
  });
}

sqmag_status sqmag_device_format(const sqmag_device* dev, char** out) {
  return guarded([&] {
    need(dev, "device");
    need(out, "out");
    *out = dup_string(format_param_json(dev->p));
  });
}

void sqmag_device_free(sqmag_device* dev) { delete dev; }

sqmag_status sqmag_device_get(const sqmag_device* dev, sqmag_param p, double* value) {
  return guarded([&] {
    need(dev, "device");
    need(value, "value");
    check_param(p);
    *value = dev->p.model.get(static_cast<Param>(p));
  });
}

sqmag_status sqmag_device_set(sqmag_device* dev, sqmag_param p, double value) {
  return guarded([&] {
    need(dev, "device");
    check_param(p);
    auto arr = dev->p.model.to_array();
    arr[static_cast<std::size_t>(p)] = value;
    DeviceModel m = DeviceModel::from_array(arr, dev->p.model.a1);
    m.validate();
    dev->p.model = m;
  });
}

sqmag_status sqmag_device_areas(const sqmag_device* dev, double* a1, double* a2) {
  return guarded([&] {
    need(dev, "device");
    if (a1) *a1 = dev->p.model.a1;
    if (a2) *a2 = dev->p.a2;
  });
}

sqmag_status sqmag_device_modes(const sqmag_device* dev, double ib, sqmag_modes* out) {
  return guarded([&] {
    need(dev, "device");
    need(out, "out");
    const ModePair m = forward_mode(dev->p.model, ib, model_options(dev->p));
    *out = {m.f_minus, m.f_plus, m.plus_visible};
  });
}

sqmag_status sqmag_device_modes_at_flux(const sqmag_device* dev, double phi1, sqmag_modes* out) {
  return guarded([&] {
    need(dev, "device");
    need(out, "out");
    const ModePair m = forward_mode_at_flux(dev->p.model, phi1, model_options(dev->p));
    *out = {m.f_minus, m.f_plus, m.plus_visible};
  });
}

sqmag_status sqmag_responsivity(const sqmag_device* dev, double phi1, double* out) {
  return guarded([&] {
    need(dev, "device");
    need(out, "out");
    *out = responsivity(dev->p.model, phi1, model_options(dev->p));
  });
}

sqmag_status sqmag_device_derived(const sqmag_device* dev, sqmag_derived* out) {
  return guarded([&] {
    need(dev, "device");
    need(out, "out");
    const DerivedQuantities d = derived_quantities(dev->p.model);
    const auto& e = d.energies;
    *out = {e.fpl1, e.fpl2, e.ec1, e.ec2, e.ej1, e.ej2, d.b, d.b0, d.bc};
  });
}

// ---- sweeps

sqmag_status sqmag_simulate_sweep(const sqmag_device* dev, double ib_min, double ib_max, double step,
                                  double noise_hz, uint64_t seed, sqmag_sweep** out) {
  return guarded([&] {
    need(dev, "device");
    need(out, "out");
    if (!(step > 0.0) || !std::isfinite(step)) fail(ErrorCode::InvalidArgument, "step must be > 0");
    if (!(ib_max >= ib_min) || !std::isfinite(ib_min) || !std::isfinite(ib_max))
      fail(ErrorCode::InvalidArgument, "bias range must satisfy min <= max");
    if (!(noise_hz >= 0.0)) fail(ErrorCode::InvalidArgument, "noise must be >= 0");
    const auto n = static_cast<std::size_t>(std::floor((ib_max - ib_min) / step + 1e-9)) + 1;
    std::vector<double> ib(n);
    for (std::size_t i = 0; i < n; ++i) ib[i] = ib_min + static_cast<double>(i) * step;
    const auto modes = forward_spectrum(dev->p.model, ib, model_options(dev->p));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto sweep = std::make_unique<sqmag_sweep>();
    for (std::size_t i = 0; i < n; ++i) {
      const double nm = noise_hz > 0.0 ? noise_hz * gauss(rng) : 0.0;
      const double np = noise_hz > 0.0 ? noise_hz * gauss(rng) : 0.0;
      sweep->points.push_back({ib[i], modes[i].f_minus + nm, Branch::Minus, 1.0});
      sweep->points.push_back({ib[i], modes[i].f_plus + np, Branch::Plus, modes[i].plus_visible ? 1.0 : 0.0});
    }
    *out = sweep.release();
  });
}

sqmag_status sqmag_sweep_load(const char* path, sqmag_sweep** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new sqmag_sweep{parse_sweep_csv(read_text_file(path))};
  });
}

sqmag_status sqmag_sweep_save(const sqmag_sweep* sweep, const char* path) {
  return guarded([&] {
    need(sweep, "sweep");
    need(path, "path");
    write_text_file(path, format_sweep_csv(sweep->points));
  });
}

sqmag_status sqmag_sweep_format(const sqmag_sweep* sweep, char** out) {
  return guarded([&] {
    need(sweep, "sweep");
    need(out, "out");
    *out = dup_string(format_sweep_csv(sweep->points));
  });
}

size_t sqmag_sweep_size(const sqmag_sweep* sweep) { return sweep ? sweep->points.size() : 0; }

sqmag_status sqmag_sweep_get(const sqmag_sweep* sweep, size_t i, sqmag_point* out) {
  return guarded([&] {
    need(sweep, "sweep");
    need(out, "out");
    if (i >= sweep->points.size()) fail(ErrorCode::InvalidArgument, "sweep index out of range");
    const auto& p = sweep->points[i];
    *out = {p.ib, p.freq, static_cast<int>(p.branch), p.weight};
  });
}

void sqmag_sweep_free(sqmag_sweep* sweep) { delete sweep; }

// ---- fit

sqmag_status sqmag_fit_spectrum(const sqmag_sweep* sweep, const sqmag_device* init, const sqmag_fit_options* options,
                                sqmag_fit** out) {
  return guarded([&] {
    need(sweep, "sweep");
    need(init, "initial device");
    need(out, "out");
    FitOptions opt;
    opt.model = model_options(init->p);
    if (init->p.free) opt.free = *init->p.free;
    if (options) {
      if (options->max_iterations > 0) opt.lm.max_iterations = options->max_iterations;
      if (options->continuation >= 0) opt.continuation = options->continuation != 0;
      if (options->require_both_branches >= 0) opt.require_both_branches = options->require_both_branches != 0;
    }
    auto fit = std::make_unique<sqmag_fit>();
    fit->result = fit_spectrum(sweep->points, init->p.model, opt);
    fit->init = init->p;
    *out = fit.release();
  });
}

sqmag_status sqmag_fit_summary_get(const sqmag_fit* fit, sqmag_fit_summary* out) {
  return guarded([&] {
    need(fit, "fit");
    need(out, "out");
    const FitResult& r = fit->result;
    out->residual_rms = r.residual_rms;
    out->iterations = r.iterations;
    out->converged = r.converged;
    out->boundary_optimum = r.boundary_optimum;
    out->points_used = r.points_used;
    const auto v = r.params.to_array();
    for (std::size_t i = 0; i < kParamCount; ++i) {
      out->value[i] = v[i];
      out->sigma[i] = r.sigma[i];
      out->free[i] = r.free[i];
    }
  });
}

sqmag_status sqmag_fit_device(const sqmag_fit* fit, sqmag_device** out) {
  return guarded([&] {
    need(fit, "fit");
    need(out, "out");
    ParamFile p = fit->init;
    p.model = fit->result.params;
    *out = new sqmag_device{p};
  });
}

sqmag_status sqmag_fit_report(const sqmag_fit* fit, char** out) {
  return guarded([&] {
    need(fit, "fit");
    need(out, "out");
    *out = dup_string(format_fit_report(fit->result));
  });
}

void sqmag_fit_free(sqmag_fit* fit) { delete fit; }

// ---- inversion

sqmag_status sqmag_invert_flux(const sqmag_device* dev, double f_minus, double f_plus, double minus_slope,
                               const sqmag_invert_options* options, sqmag_candidates** out) {
  return guarded([&] {
    need(dev, "device");
    need(out, "out");
    FluxObservation obs;
    obs.f_minus = f_minus;
    if (!std::isnan(f_plus)) obs.f_plus = f_plus;
    if (!std::isnan(minus_slope)) obs.minus_slope = minus_slope;
    InvertOptions opt;
    opt.model = model_options(dev->p);
    if (options) {
      if (options->tol_hz > 0.0) opt.tol = options->tol_hz;
      const bool lo = !std::isnan(options->window_lo), hi = !std::isnan(options->window_hi);
      if (lo != hi) fail(ErrorCode::InvalidArgument, "window needs both ends");
      if (lo) opt.window = std::make_pair(options->window_lo, options->window_hi);
      if (!std::isnan(options->slope_rel_tol)) opt.slope_rel_tol = options->slope_rel_tol;
    }
    *out = new sqmag_candidates{invert_flux(dev->p.model, obs, opt)};
  });
}

size_t sqmag_candidates_size(const sqmag_candidates* c) { return c ? c->list.size() : 0; }

sqmag_status sqmag_candidates_get(const sqmag_candidates* c, size_t i, sqmag_candidate* out) {
  return guarded([&] {
    need(c, "candidates");
    need(out, "out");
    if (i >= c->list.size()) fail(ErrorCode::InvalidArgument, "candidate index out of range");
    const auto& k = c->list[i];
    *out = {k.phi1, k.phi2, k.field, k.residual, k.unique, k.mirror_ambiguous};
  });
}

void sqmag_candidates_free(sqmag_candidates* c) { delete c; }

// ---- period

sqmag_status sqmag_modulation_period(double r, double tol, int64_t max_denominator, double area1, sqmag_period* out) {
  return guarded([&] {
    need(out, "out");
    std::optional<double> a;
    if (area1 > 0.0) a = area1;
    const ModulationPeriod mp = modulation_period(r, tol > 0.0 ? tol : kDefaultPeriodTolerance,
                                                  max_denominator > 0 ? max_denominator : kDefaultMaxDenominator, a);
    out->numerator = mp.numerator;
    out->denominator = mp.denominator;
    out->period_phi0 = mp.period_phi0;
    out->period_field = mp.period_field ? *mp.period_field : std::numeric_limits<double>::quiet_NaN();
  });
}

// ---- power calibration

namespace {

void calibrate(const sqmag_device* dev, const std::vector<RabiPowerPoint>& pts, int enforce, sqmag_calibration* out) {
  need(dev, "device");
  need(out, "out");
  CalibrationOptions opt;
  opt.enforce_slope = enforce != 0;
  const AttenuationCalibration c = calibrate_attenuation(pts, resonance_of(dev->p), opt);
  *out = {c.attenuation_db, c.residual_rms_db, c.free_slope, c.slope_deviation, c.slope_ok};
}

}  // namespace

sqmag_status sqmag_calibrate_power(const sqmag_device* dev, const double* p_in_dbm, const double* rabi, size_t n,
                                   int enforce_slope, sqmag_calibration* out) {
  return guarded([&] {
    if (n > 0) {
      need(p_in_dbm, "p_in_dbm");
      need(rabi, "rabi");
    }
    std::vector<RabiPowerPoint> pts;
    for (size_t i = 0; i < n; ++i) pts.push_back({p_in_dbm[i], rabi[i]});
    calibrate(dev, pts, enforce_slope, out);
  });
}

sqmag_status sqmag_calibrate_power_file(const sqmag_device* dev, const char* path, int enforce_slope,
                                        sqmag_calibration* out) {
  return guarded([&] {
    need(path, "path");
    calibrate(dev, parse_rabi_csv(read_text_file(path)), enforce_slope, out);
  });
}

// ---- traces

sqmag_status sqmag_synthesize_trace(const sqmag_device* dev, double phi1, const sqmag_noise_model* model,
                                    double duration, double dt, uint64_t seed, int as_s11, double p_in_dbm,
                                    sqmag_trace** out) {
  return guarded([&] {
    need(dev, "device");
    need(model, "noise model");
    need(out, "out");
    const ParamFile& p = dev->p;
    const ModelOptions mo = model_options(p);
    const double r = responsivity(p.model, phi1, mo);
    const double area = p.mode_area(phi1);
    const double conv = std::pow(area / kFluxQuantum * r, 2);
    const NoiseModel nf{model->a * conv, model->alpha, model->b * conv, model->gamma, model->s0 * conv};
    const double f_center = forward_mode_at_flux(p.model, phi1, mo).f_minus;
    auto tr = std::make_unique<sqmag_trace>();
    FrequencyTrace ft = synthesize_trace(nf, f_center, duration, dt, seed);
    tr->t.f_drive = f_center;
    tr->t.p_in_dbm = p_in_dbm;
    if (as_s11) {
      tr->t.has_s11 = true;
      tr->t.s11 = reflect_trace(ft, resonance_of(p), f_center, rabi_for(p, f_center, p_in_dbm), p_in_dbm);
    } else {
      tr->t.has_s11 = false;
      tr->t.freq = std::move(ft);
    }
    *out = tr.release();
  });
}

sqmag_status sqmag_trace_load(const char* path, sqmag_trace** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    *out = new sqmag_trace{parse_trace_csv(read_text_file(path))};
  });
}

sqmag_status sqmag_trace_save(const sqmag_trace* trace, const char* path) {
  return guarded([&] {
    need(trace, "trace");
    need(path, "path");
    write_text_file(path, trace->t.has_s11 ? format_trace_csv(trace->t.s11) : format_trace_csv(trace->t.freq));
  });
}

sqmag_status sqmag_trace_format(const sqmag_trace* trace, char** out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    *out = dup_string(trace->t.has_s11 ? format_trace_csv(trace->t.s11) : format_trace_csv(trace->t.freq));
  });
}

sqmag_status sqmag_trace_info_get(const sqmag_trace* trace, sqmag_trace_info* out) {
  return guarded([&] {
    need(trace, "trace");
    need(out, "out");
    const TraceFile& t = trace->t;
    out->samples = t.has_s11 ? t.s11.samples.size() : t.freq.samples.size();
    out->dt = t.has_s11 ? t.s11.dt : t.freq.dt;
    out->has_s11 = t.has_s11;
    out->f_drive = t.f_drive;
    out->p_in_dbm = t.p_in_dbm;
  });
}

void sqmag_trace_free(sqmag_trace* trace) { delete trace; }

// ---- spectra

sqmag_status sqmag_nef_spectrum(const sqmag_device* dev, const sqmag_trace* trace, double phi1, sqmag_spectrum** out) {
  return guarded([&] {
    need(dev, "device");
    need(trace, "trace");
    need(out, "out");
    const ParamFile& p = dev->p;
    const TraceFile& t = trace->t;
    FrequencyTrace ft;
    if (t.has_s11)
      ft = extract_frequency_trace(t.s11, resonance_of(p), rabi_for(p, t.s11.f_drive, t.s11.p_in_dbm));
    else
      ft = t.freq;
    auto sp = std::make_unique<sqmag_spectrum>();
    sp->responsivity = responsivity(p.model, phi1, model_options(p));
    sp->area = p.mode_area(phi1);
    sp->off_curve = ft.off_curve_count;
    sp->sphi = flux_asd(ft, sp->responsivity);
    sp->sb = field_asd(sp->sphi, sp->area);
    *out = sp.release();
  });
}

sqmag_status sqmag_spectrum_average(const sqmag_spectrum* const* spectra, size_t n, sqmag_spectrum** out) {
  return guarded([&] {
    need(out, "out");
    if (n == 0) fail(ErrorCode::InvalidArgument, "nothing to average");
    need(spectra, "spectra");
    std::vector<SpectralDensity> phi, b;
    auto sp = std::make_unique<sqmag_spectrum>();
    sp->area = 0.0;
    for (size_t i = 0; i < n; ++i) {
      need(spectra[i], "spectrum");
      if (i > 0 && std::abs(spectra[i]->area - spectra[0]->area) > 1e-9 * spectra[0]->area)
        fail(ErrorCode::InvalidArgument, "spectra use different loop areas");
      phi.push_back(spectra[i]->sphi);
      b.push_back(spectra[i]->sb);
      sp->off_curve += spectra[i]->off_curve;
    }
    sp->sphi = average_densities(phi);
    sp->sb = average_densities(b);
    sp->area = spectra[0]->area;
    sp->responsivity = spectra[0]->responsivity;
    *out = sp.release();
  });
}

sqmag_status sqmag_spectrum_load(const char* path, double area, sqmag_spectrum** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    if (!(area > 0.0)) fail(ErrorCode::InvalidArgument, "area must be > 0");
    SpectrumFile f = parse_spectrum_csv(read_text_file(path));
    auto sp = std::make_unique<sqmag_spectrum>();
    sp->sphi = std::move(f.sphi);
    sp->sb = std::move(f.sb);
    sp->area = area;
    *out = sp.release();
  });
}

sqmag_status sqmag_spectrum_save(const sqmag_spectrum* sp, const char* path) {
  return guarded([&] {
    need(sp, "spectrum");
    need(path, "path");
    write_text_file(path, format_spectrum_csv(sp->sphi, sp->sb));
  });
}

sqmag_status sqmag_spectrum_format(const sqmag_spectrum* sp, char** out) {
  return guarded([&] {
    need(sp, "spectrum");
    need(out, "out");
    *out = dup_string(format_spectrum_csv(sp->sphi, sp->sb));
  });
}

sqmag_status sqmag_spectrum_info_get(const sqmag_spectrum* sp, sqmag_spectrum_info* out) {
  return guarded([&] {
    need(sp, "spectrum");
    need(out, "out");
    *out = {sp->sphi.freqs.size(), sp->sphi.bandwidth, sp->sphi.averages, sp->area, sp->responsivity, sp->off_curve};
  });
}

sqmag_status sqmag_spectrum_get(const sqmag_spectrum* sp, size_t i, double* f, double* sphi, double* sb) {
  return guarded([&] {
    need(sp, "spectrum");
    if (i >= sp->sphi.freqs.size()) fail(ErrorCode::InvalidArgument, "bin index out of range");
    if (f) *f = sp->sphi.freqs[i];
    if (sphi) *sphi = sp->sphi.amplitude[i];
    if (sb) *sb = sp->sb.amplitude[i];
  });
}

void sqmag_spectrum_free(sqmag_spectrum* sp) { delete sp; }

sqmag_status sqmag_noise_fit(const sqmag_spectrum* sp, sqmag_noise_result* out) {
  return guarded([&] {
    need(sp, "spectrum");
    need(out, "out");
    fill(fit_noise_model(sp->sb), out);
  });
}

sqmag_status sqmag_noise_report(const sqmag_spectrum* sp, const sqmag_noise_result* fit, char** out) {
  return guarded([&] {
    need(sp, "spectrum");
    need(fit, "fit");
    need(out, "out");
    NoiseFit f;
    f.model = {fit->model.a, fit->model.alpha, fit->model.b, fit->model.gamma, fit->model.s0};
    f.residual_rms = fit->residual_rms;
    f.converged = fit->converged;
    f.iterations = fit->iterations;
    f.flicker_degenerate = fit->flicker_degenerate;
    f.telegraph_degenerate = fit->telegraph_degenerate;
    f.white_degenerate = fit->white_degenerate;
    f.crossover_flicker_white = fit->crossover_flicker_white;
    f.crossover_telegraph_white = fit->crossover_telegraph_white;
    f.crossover_flicker_telegraph = fit->crossover_flicker_telegraph;
    *out = dup_string(format_noise_report(f, sp->area));
  });
}

}  // extern "C"
