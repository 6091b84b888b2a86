// Command-line front end. Talks to the toolkit through the C API only.
#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "sqmag/sqmag.h"

namespace {

constexpr double kTwoPi = 6.283185307179586;
constexpr double kFluxQuantum = 2.067833848461929e-15;

// exit codes
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitPhysics = 3;
constexpr int kExitNonConvergence = 4;
constexpr int kExitNoSolution = 5;

struct Failure {
  int exit_code;
  std::string message;
};

int exit_code_for(sqmag_status s) {
  switch (s) {
    case SQMAG_OK: return kExitOk;
    case SQMAG_ERR_INVALID_ARGUMENT:
    case SQMAG_ERR_PARSE:
    case SQMAG_ERR_IO:
    case SQMAG_ERR_INSUFFICIENT_SPAN: return kExitInput;
    case SQMAG_ERR_DIVERGENT_INDUCTANCE:
    case SQMAG_ERR_POLE_PROXIMITY:
    case SQMAG_ERR_FIELD_ABOVE_CRITICAL:
    case SQMAG_ERR_ZERO_RESPONSIVITY:
    case SQMAG_ERR_SLOPE_MISMATCH: return kExitPhysics;
    case SQMAG_ERR_NON_CONVERGENCE: return kExitNonConvergence;
    case SQMAG_ERR_NO_CANDIDATE:
    case SQMAG_ERR_NO_RATIONAL_WITHIN_BOUND: return kExitNoSolution;
    default: return 1;
  }
}

void check(sqmag_status s) {
  if (s != SQMAG_OK) throw Failure{exit_code_for(s), std::string(sqmag_status_string(s)) + ": " + sqmag_last_error()};
}

[[noreturn]] void input_error(const std::string& msg) { throw Failure{kExitInput, msg}; }

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Device = std::unique_ptr<sqmag_device, Deleter<sqmag_device, sqmag_device_free>>;
using Sweep = std::unique_ptr<sqmag_sweep, Deleter<sqmag_sweep, sqmag_sweep_free>>;
using Fit = std::unique_ptr<sqmag_fit, Deleter<sqmag_fit, sqmag_fit_free>>;
using Candidates = std::unique_ptr<sqmag_candidates, Deleter<sqmag_candidates, sqmag_candidates_free>>;
using Trace = std::unique_ptr<sqmag_trace, Deleter<sqmag_trace, sqmag_trace_free>>;
using Spectrum = std::unique_ptr<sqmag_spectrum, Deleter<sqmag_spectrum, sqmag_spectrum_free>>;

struct CString {
  char* p = nullptr;
  ~CString() { sqmag_string_free(p); }
};

// "-" is stdout
void emit(const std::string& path, const char* text) {
  if (path == "-") {
    std::fputs(text, stdout);
    std::fflush(stdout);
    return;
  }
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) input_error("cannot open '" + path + "' for writing");
  const bool ok = std::fputs(text, f) >= 0;
  if (std::fclose(f) != 0 || !ok) input_error("write to '" + path + "' failed");
}

Device load_device(std::string path) {
  if (path.empty()) {
    const char* env = std::getenv("SQMAG_PARAMS");
    if (env == nullptr || *env == '\0') input_error("--params not given and SQMAG_PARAMS is not set");
    path = env;
  }
  sqmag_device* d = nullptr;
  check(sqmag_device_load(path.c_str(), &d));
  return Device(d);
}

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string params, out = "-";
  double ib_min = -1.0, ib_max = 1.0, step_ua = 10.0, noise_mhz = 0.0;
  std::uint64_t seed = 1;
};

int run_simulate(const SimulateArgs& a) {
  if (!(a.step_ua > 0.0)) input_error("--step-uA must be > 0");
  if (!(a.ib_max >= a.ib_min)) input_error("--ib-max-mA must be >= --ib-min-mA");
  if (!(a.noise_mhz >= 0.0)) input_error("--noise-MHz must be >= 0");
  Device dev = load_device(a.params);
  sqmag_sweep* s = nullptr;
  check(sqmag_simulate_sweep(dev.get(), a.ib_min * 1e-3, a.ib_max * 1e-3, a.step_ua * 1e-6, a.noise_mhz * 1e6, a.seed,
                             &s));
  Sweep sweep(s);
  CString text;
  check(sqmag_sweep_format(sweep.get(), &text.p));
  emit(a.out, text.p);
  return kExitOk;
}

struct FitArgs {
  std::string sweep, params, out, report = "-";
  int max_iterations = 0;
};

int run_fit(const FitArgs& a) {
  Device init = load_device(a.params);
  sqmag_sweep* s = nullptr;
  check(sqmag_sweep_load(a.sweep.c_str(), &s));
  Sweep sweep(s);
  sqmag_fit_options opt{a.max_iterations, -1, -1};
  sqmag_fit* f = nullptr;
  const sqmag_status st = sqmag_fit_spectrum(sweep.get(), init.get(), &opt, &f);
  if (st == SQMAG_ERR_NON_CONVERGENCE)
    throw Failure{kExitNonConvergence, std::string("fit did not converge: ") + sqmag_last_error() +
                                           "\n  try a closer initial guess or more iterations (--max-iterations)"};
  check(st);
  Fit fit(f);
  CString report;
  check(sqmag_fit_report(fit.get(), &report.p));
  if (!a.out.empty()) {
    sqmag_device* d = nullptr;
    check(sqmag_fit_device(fit.get(), &d));
    Device fitted(d);
    CString text;
    check(sqmag_device_format(fitted.get(), &text.p));
    emit(a.out, text.p);
  }
  emit(a.report, report.p);
  return kExitOk;
}

struct InvertArgs {
  std::string params;
  double fminus = NAN;
  std::optional<double> fplus, slope, slope_rel_tol;
  double tol_mhz = 1.0;
  std::vector<double> window;
};

int run_invert(const InvertArgs& a) {
  if (!(a.tol_mhz > 0.0)) input_error("--tol must be > 0");
  if (!a.window.empty() && a.window.size() != 2) input_error("--window takes two values");
  Device dev = load_device(a.params);
  sqmag_invert_options o{a.tol_mhz * 1e6, NAN, NAN, NAN};
  if (a.window.size() == 2) {
    o.window_lo = a.window[0];
    o.window_hi = a.window[1];
  }
  if (a.slope_rel_tol) o.slope_rel_tol = *a.slope_rel_tol;
  sqmag_candidates* c = nullptr;
  check(sqmag_invert_flux(dev.get(), a.fminus * 1e9, a.fplus ? *a.fplus * 1e9 : NAN, a.slope ? *a.slope * 1e9 : NAN,
                          &o, &c));
  Candidates cands(c);
  std::printf("unique,phi1,phi2,B_uT,residual_MHz,mirror_ambiguous\n");
  for (std::size_t i = 0; i < sqmag_candidates_size(cands.get()); ++i) {
    sqmag_candidate k;
    check(sqmag_candidates_get(cands.get(), i, &k));
    std::printf("%s,%.9g,%.9g,%.9g,%.6g,%s\n", k.unique ? "true" : "false", k.phi1, k.phi2, k.field / 1e-6,
                k.residual / 1e6, k.mirror_ambiguous ? "true" : "false");
  }
  return kExitOk;
}

struct NefArgs {
  std::string params, trace, average_dir, out = "-", report;
  double phi1 = NAN;
};

int run_nef(const NefArgs& a) {
  if (a.trace.empty() && a.average_dir.empty()) input_error("give --trace, --average-dir, or both");
  Device dev = load_device(a.params);
  std::vector<std::string> files;
  if (!a.trace.empty()) files.push_back(a.trace);
  if (!a.average_dir.empty()) {
    namespace fs = std::filesystem;
    std::error_code ec;
    std::vector<std::string> found;
    for (const auto& e : fs::directory_iterator(a.average_dir, ec))
      if (e.is_regular_file() && e.path().extension() == ".csv") found.push_back(e.path().string());
    if (ec) input_error("cannot list --average-dir '" + a.average_dir + "': " + ec.message());
    if (found.empty()) input_error("no .csv traces in --average-dir '" + a.average_dir + "'");
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  }
  std::vector<Spectrum> spectra;
  for (const auto& path : files) {
    sqmag_trace* t = nullptr;
    check(sqmag_trace_load(path.c_str(), &t));
    Trace trace(t);
    sqmag_spectrum* sp = nullptr;
    check(sqmag_nef_spectrum(dev.get(), trace.get(), a.phi1, &sp));
    spectra.emplace_back(sp);
  }
  std::vector<const sqmag_spectrum*> raw;
  for (const auto& s : spectra) raw.push_back(s.get());
  sqmag_spectrum* avg_raw = nullptr;
  check(sqmag_spectrum_average(raw.data(), raw.size(), &avg_raw));
  Spectrum avg(avg_raw);
  CString csv;
  check(sqmag_spectrum_format(avg.get(), &csv.p));
  emit(a.out, csv.p);

  sqmag_spectrum_info info;
  check(sqmag_spectrum_info_get(avg.get(), &info));
  sqmag_noise_result fit;
  const sqmag_status st = sqmag_noise_fit(avg.get(), &fit);
  if (st == SQMAG_ERR_NON_CONVERGENCE)
    throw Failure{kExitNonConvergence, std::string("noise fit did not converge: ") + sqmag_last_error()};
  check(st);
  CString report;
  check(sqmag_noise_report(avg.get(), &fit, &report.p));
  std::string head = "traces averaged: " + std::to_string(info.averages) + "\nbins: " + std::to_string(info.bins) +
                     ", BW = " + fmt("%.6g", info.bandwidth) + " Hz\nresponsivity: " +
                     fmt("%.6g", info.responsivity / 1e9) + " GHz/Phi0 at phi1 = " + fmt("%.6g", a.phi1) +
                     "\noff-curve samples: " + std::to_string(info.off_curve) + "\n";
  const std::string text = head + report.p;
  if (a.report.empty() && a.out == "-")
    std::fputs(text.c_str(), stderr);
  else
    emit(a.report.empty() ? "-" : a.report, text.c_str());
  return kExitOk;
}

struct PeriodArgs {
  double ratio = NAN, tol = 0.0, area_um2 = 0.0;
  std::int64_t max_den = 0;
};

int run_period(const PeriodArgs& a) {
  sqmag_period p;
  check(sqmag_modulation_period(a.ratio, a.tol, a.max_den, a.area_um2 * 1e-12, &p));
  std::printf("r = %.12g\n%lld/%lld → M = %lld Φ0\n", a.ratio, static_cast<long long>(p.numerator),
              static_cast<long long>(p.denominator), static_cast<long long>(p.period_phi0));
  if (!std::isnan(p.period_field)) std::printf("field period %.6g uT\n", p.period_field / 1e-6);
  return kExitOk;
}

struct PowerArgs {
  std::string params, data;
  bool strict = false;
};

int run_power(const PowerArgs& a) {
  Device dev = load_device(a.params);
  sqmag_calibration cal;
  check(sqmag_calibrate_power_file(dev.get(), a.data.c_str(), a.strict ? 1 : 0, &cal));
  std::printf("attenuation A = %.3f dB\nresidual rms %.4f dB\nfree-fit slope %.5f decades/dB (sqrt(P) law: 0.05)\n",
              cal.attenuation_db, cal.residual_rms_db, cal.free_slope);
  if (!cal.slope_ok)
    std::fprintf(stderr, "SlopeMismatch warning: free-fit slope deviates from the sqrt(P) law by %.1f%%\n",
                 100 * cal.slope_deviation);
  return kExitOk;
}

struct SynthArgs {
  std::string params, out = "-";
  double phi1 = NAN, duration = 48.0, dt_us = 960.0, s0_pt = 11.0, alpha = 1.42, a_rel = 26.3, b_rel = 100.0,
         gamma_hz = 1.07, p_in_dbm = -40.0;
  bool s11 = false;
  std::uint64_t seed = 1;
};

int run_synth(const SynthArgs& a) {
  if (!(a.dt_us > 0.0)) input_error("--dt-us must be > 0");
  if (!(a.duration > 0.0)) input_error("--duration-s must be > 0");
  Device dev = load_device(a.params);
  const double s0 = std::pow(a.s0_pt * 1e-12, 2);
  const sqmag_noise_model m{a.a_rel * s0, a.alpha, a.b_rel * s0, kTwoPi * a.gamma_hz, s0};
  sqmag_trace* t = nullptr;
  check(sqmag_synthesize_trace(dev.get(), a.phi1, &m, a.duration, a.dt_us * 1e-6, a.seed, a.s11 ? 1 : 0, a.p_in_dbm,
                               &t));
  Trace trace(t);
  CString text;
  check(sqmag_trace_format(trace.get(), &text.p));
  emit(a.out, text.p);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-SQUID magnetometer toolkit"};
  app.require_subcommand(1);
  const std::string params_help = "device parameter file (JSON); defaults to $SQMAG_PARAMS";

  SimulateArgs sim;
  auto* c_sim = app.add_subcommand("simulate-spectrum", "forward model on a bias grid, both branches");
  c_sim->add_option("--params", sim.params, params_help);
  c_sim->add_option("--ib-min-mA", sim.ib_min, "first bias current")->capture_default_str();
  c_sim->add_option("--ib-max-mA", sim.ib_max, "last bias current")->capture_default_str();
  c_sim->add_option("--step-uA", sim.step_ua, "bias step")->capture_default_str();
  c_sim->add_option("--noise-MHz", sim.noise_mhz, "Gaussian frequency noise")->capture_default_str();
  c_sim->add_option("--seed", sim.seed, "noise seed")->capture_default_str();
  c_sim->add_option("--out", sim.out, "sweep CSV, - for stdout")->capture_default_str();

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit-spectrum", "fit the device model to a sweep");
  c_fit->add_option("--sweep", fit.sweep, "sweep CSV")->required();
  c_fit->add_option("--params", fit.params, "initial guess; " + params_help);
  c_fit->add_option("--out", fit.out, "write the fitted parameter file here");
  c_fit->add_option("--report", fit.report, "report destination, - for stdout")->capture_default_str();
  c_fit->add_option("--max-iterations", fit.max_iterations, "iteration cap (0: default)");

  InvertArgs inv;
  auto* c_inv = app.add_subcommand("invert-flux", "absolute flux from observed mode frequencies");
  c_inv->add_option("--params", inv.params, params_help);
  c_inv->add_option("--fminus", inv.fminus, "minus-mode frequency in GHz")->required();
  c_inv->add_option("--fplus", inv.fplus, "plus-mode frequency in GHz");
  c_inv->add_option("--slope", inv.slope, "measured df_minus/dphi1 in GHz per Phi0 (resolves the sign of phi1)");
  c_inv->add_option("--slope-rel-tol", inv.slope_rel_tol, "also match the slope magnitude to this fraction");
  c_inv->add_option("--tol", inv.tol_mhz, "match tolerance in MHz")->capture_default_str();
  c_inv->add_option("--window", inv.window, "phi1 search window: lo hi")->expected(2);

  NefArgs nef;
  auto* c_nef = app.add_subcommand("nef", "noise-equivalent flux and field spectrum with model fit");
  c_nef->add_option("--params", nef.params, params_help);
  c_nef->add_option("--trace", nef.trace, "trace CSV (S11 or pre-extracted frequency)");
  c_nef->add_option("--average-dir", nef.average_dir, "also average every .csv trace in this directory");
  c_nef->add_option("--phi1", nef.phi1, "static flux bias of loop 1, in Phi0")->required();
  c_nef->add_option("--out", nef.out, "spectrum CSV, - for stdout")->capture_default_str();
  c_nef->add_option("--report", nef.report, "report destination (default: stdout, or stderr when --out is -)");

  PeriodArgs per;
  auto* c_per = app.add_subcommand("period", "modulation period of an area ratio");
  c_per->add_option("--ratio", per.ratio, "area ratio r = A2/A1")->required();
  c_per->add_option("--tol", per.tol, "rational tolerance (0: default)");
  c_per->add_option("--max-den", per.max_den, "largest denominator (0: default)");
  c_per->add_option("--area-um2", per.area_um2, "small-loop area, adds the field period");

  PowerArgs pow_args;
  auto* c_pow = app.add_subcommand("calibrate-power", "input-line attenuation from Rabi frequency vs power");
  c_pow->add_option("--params", pow_args.params, params_help);
  c_pow->add_option("--data", pow_args.data, "CSV with p_in_dbm,omega_r_MHz")->required();
  c_pow->add_flag("--strict", pow_args.strict, "treat a wrong power law as an error (exit 3)");

  SynthArgs syn;
  auto* c_syn = app.add_subcommand("synth-trace", "synthetic noise trace at a flux bias");
  c_syn->add_option("--params", syn.params, params_help);
  c_syn->add_option("--phi1", syn.phi1, "static flux bias of loop 1, in Phi0")->required();
  c_syn->add_option("--duration-s", syn.duration, "trace length")->capture_default_str();
  c_syn->add_option("--dt-us", syn.dt_us, "sample spacing")->capture_default_str();
  c_syn->add_option("--seed", syn.seed, "random seed")->capture_default_str();
  c_syn->add_option("--s0-pT", syn.s0_pt, "white field floor sqrt(S0) in pT/sqrt(Hz)")->capture_default_str();
  c_syn->add_option("--alpha", syn.alpha, "flicker exponent")->capture_default_str();
  c_syn->add_option("--a-rel", syn.a_rel, "flicker amplitude a / S0 (Hz^alpha)")->capture_default_str();
  c_syn->add_option("--b-rel", syn.b_rel, "telegraph plateau b / S0")->capture_default_str();
  c_syn->add_option("--gamma-Hz", syn.gamma_hz, "telegraph corner Gamma / 2 pi")->capture_default_str();
  c_syn->add_flag("--s11", syn.s11, "write S11 samples instead of frequencies");
  c_syn->add_option("--p-in-dbm", syn.p_in_dbm, "drive power for --s11")->capture_default_str();
  c_syn->add_option("--out", syn.out, "trace CSV, - for stdout")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (c_sim->parsed()) return run_simulate(sim);
    if (c_fit->parsed()) return run_fit(fit);
    if (c_inv->parsed()) return run_invert(inv);
    if (c_nef->parsed()) return run_nef(nef);
    if (c_per->parsed()) return run_period(per);
    if (c_pow->parsed()) return run_power(pow_args);
    if (c_syn->parsed()) return run_synth(syn);
  } catch (const Failure& f) {
    std::cerr << "error: " << f.message << "\n";
    return f.exit_code;
  }
  return kExitInput;
}
