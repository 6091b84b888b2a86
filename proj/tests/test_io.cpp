#include "doctest.h"

#include <cmath>

#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"
#include "sqmag/io.hpp"
#include "support.hpp"

using namespace sqmag;
using sqmag::testing::Gen;

namespace {

ParamFile table_params() {
  ParamFile p;
  p.model = sqmag::testing::fitted_model();
  p.a2 = 140e-12;
  p.resonance = ResonanceParams{7.315e9, kTwoPi * 3.4e6, kTwoPi * 0.5e6, kTwoPi * 2.0e6};
  p.attenuation_db = 90.0;
  return p;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("param file round trip") {
  const ParamFile p = table_params();
  const std::string text = format_param_json(p);
  const ParamFile q = parse_param_json(text);
  CHECK(format_param_json(q) == text);
  const auto a = p.model.to_array(), b = q.model.to_array();
  for (std::size_t i = 0; i < kParamCount; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-12));
  CHECK(q.a2 == doctest::Approx(140e-12));
  REQUIRE(q.resonance);
  CHECK(q.resonance->kappa == doctest::Approx(kTwoPi * 3.4e6));
  CHECK(*q.attenuation_db == 90.0);
  CHECK(!q.rabi);
  CHECK(q.gap_suppression);

  Gen g(3);
  for (int i = 0; i < 50; ++i) {
    ParamFile r = p;
    r.model.l1 *= g.uniform(0.5, 2);
    r.model.cs *= g.uniform(0.5, 2);
    r.model.i0 = g.uniform(-1e-6, 1e-6);
    r.model.r = g.uniform(1.5, 4);
    r.free = std::array<bool, kParamCount>{true, false, true, false, true, false, true, false, true, false, true};
    r.rabi = g.uniform(1e6, 1e8);
    const auto t1 = format_param_json(r);
    const auto back = parse_param_json(t1);
    CHECK(format_param_json(back) == t1);
    CHECK(back.model.r == round12(r.model.r));
    CHECK(*back.free == *r.free);
  }
}

TEST_CASE("param file validation") {
  const std::string good = format_param_json(table_params());
  CHECK(code_of([&] { parse_param_json("{"); }) == ErrorCode::Parse);
  auto replace = [&](const std::string& from, const std::string& to) {
    std::string s = good;
    const auto pos = s.find(from);
    REQUIRE(pos != std::string::npos);
    return s.replace(pos, from.size(), to);
  };
  // unit missing from the key
  CHECK(code_of([&] { parse_param_json(replace("\"L1_pH\"", "\"L1\"")); }) == ErrorCode::Parse);
  CHECK(code_of([&] { parse_param_json(replace("\"circuit\"", "\"circuits\"")); }) == ErrorCode::Parse);
  CHECK(code_of([&] { parse_param_json(replace("\"r\": 2.8048", "\"r\": \"2.8\"")); }) == ErrorCode::Parse);
  CHECK(code_of([&] { parse_param_json(replace("\"d1\": 0.149", "\"d1\": 1.5")); }) == ErrorCode::Parse);
  CHECK(code_of([&] { parse_param_json(replace("\"gap_suppression\": true", "\"gap_suppression\": 1")); }) ==
        ErrorCode::Parse);
  // minimal document without the optional sections
  const std::string minimal = R"({"circuit": {"L1_pH": 322, "L2_pH": 324, "C1_fF": 722, "C2_fF": 718,
    "Cs_fF": 71, "d1": 0.149, "d2": 0.184},
    "flux": {"r": 2.8048, "Ip_mA": 0.782, "I0_nA": 418, "Ibc_mA": 19.2},
    "areas": {"A1_um2": 50, "A2_um2": 140}})";
  const auto m = parse_param_json(minimal);
  CHECK(m.model.ip == doctest::Approx(0.782e-3));
  CHECK(!m.resonance);
  CHECK(!m.free);
  CHECK(m.mode_area(0.073) == doctest::Approx(140e-12));
}

TEST_CASE("sweep file round trip and errors") {
  const auto pts = sqmag::testing::synthetic_sweep(sqmag::testing::fitted_model(), 60, 3e-3, 1e6, 5);
  const std::string text = format_sweep_csv(pts);
  const auto back = parse_sweep_csv(text);
  REQUIRE(back.size() == pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(back[i].ib == doctest::Approx(pts[i].ib).epsilon(1e-11));
    CHECK(back[i].freq == doctest::Approx(pts[i].freq).epsilon(1e-11));
    CHECK(back[i].branch == pts[i].branch);
  }
  CHECK(format_sweep_csv(back) == text);

  const auto no_weight = parse_sweep_csv("# comment line\nib_mA,freq_GHz,branch\n0.1,9.5,minus\n-0.2, 9.7 ,plus\n");
  REQUIRE(no_weight.size() == 2);
  CHECK(no_weight[1].weight == 1.0);
  CHECK(no_weight[1].freq == doctest::Approx(9.7e9));
  CHECK(code_of([] { parse_sweep_csv(""); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_sweep_csv("ib,freq_GHz,branch\n1,2,minus\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_sweep_csv("ib_mA,freq_GHz,branch\n1,2,middle\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_sweep_csv("ib_mA,freq_GHz,branch\n1,x,minus\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_sweep_csv("ib_mA,freq_GHz,branch\n1,2\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_sweep_csv("ib_mA,freq_GHz,branch,weight\n1,2,minus,-1\n"); }) == ErrorCode::Parse);
  CHECK(parse_sweep_csv("ib_mA,freq_GHz,branch\n").empty());
}

TEST_CASE("trace file round trip and sampling check") {
  NoiseModel m;
  m.s0 = 1e3;
  const auto ft = synthesize_trace(m, 8.8e9, 0.2, 1e-3, 4);
  const std::string text = format_trace_csv(ft);
  const auto back = parse_trace_csv(text);
  CHECK(!back.has_s11);
  REQUIRE(back.freq.samples.size() == ft.samples.size());
  CHECK(back.freq.dt == 1e-3);
  CHECK(format_trace_csv(back.freq) == text);

  const ResonanceParams res{8.8e9, kTwoPi * 3.4e6, kTwoPi * 0.5e6, kTwoPi * 2.0e6};
  const auto ct = reflect_trace(ft, res, 8.8e9, 1e6, -30.0);
  const std::string ctext = format_trace_csv(ct);
  const auto cback = parse_trace_csv(ctext);
  CHECK(cback.has_s11);
  CHECK(cback.s11.f_drive == doctest::Approx(8.8e9));
  CHECK(cback.s11.p_in_dbm == -30.0);
  CHECK(format_trace_csv(cback.s11) == ctext);

  // 48 s at 960 us: twelve digits keep the time column uniform
  std::vector<double> x(50000, 1e9);
  FrequencyTrace longer;
  longer.samples = x;
  longer.dt = 960e-6;
  CHECK(parse_trace_csv(format_trace_csv(longer)).freq.samples.size() == 50000);

  CHECK(code_of([] { parse_trace_csv("t_s,f_GHz\n0,1\n0.001,1\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_trace_csv("# dt_s=0.001\nt_s,f_GHz\n0,1\n0.0011,1\n"); }) == ErrorCode::Parse);
  CHECK(code_of([] { parse_trace_csv("# dt_s=0.001\nt_s,re_s11,im_s11\n0,1,0\n0.001,1,0\n"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { parse_trace_csv("# dt_s=0.001\n# colour=red\nt_s,f_GHz\n0,1\n0.001,1\n"); }) ==
        ErrorCode::Parse);
  CHECK(code_of([] { parse_trace_csv("# dt_s=0.001\nt_s,f_GHz\n0,1\n"); }) == ErrorCode::Parse);
}

TEST_CASE("spectrum and power files") {
  NoiseModel m;
  m.s0 = 1e6;
  auto sphi = flux_asd(synthesize_trace(m, 0.0, 1.0, 1e-3, 8), 2e10);
  auto sb = field_asd(sphi, 140e-12);
  const std::string text = format_spectrum_csv(sphi, sb);
  const auto back = parse_spectrum_csv(text);
  CHECK(back.sphi.freqs.size() == sphi.freqs.size());
  CHECK(back.sb.unit == DensityUnit::TeslaPerRootHz);
  CHECK(back.sphi.bandwidth == doctest::Approx(sphi.bandwidth));
  CHECK(format_spectrum_csv(back.sphi, back.sb) == text);

  std::vector<RabiPowerPoint> pts{{-40, kTwoPi * 1e6}, {-30, kTwoPi * 3.16e6}};
  const auto rtext = format_rabi_csv(pts);
  const auto rback = parse_rabi_csv(rtext);
  CHECK(rback[1].rabi == doctest::Approx(pts[1].rabi));
  CHECK(format_rabi_csv(rback) == rtext);
}

TEST_CASE("fit report") {
  const auto truth = sqmag::testing::fitted_model();
  const auto data = sqmag::testing::synthetic_sweep(truth, 400, 12e-3, 1e6, 21);
  FitResult fit = fit_spectrum(data, truth);
  const std::string rep = format_fit_report(fit);
  CHECK(rep.find("modulation period M = 625 Φ0") != std::string::npos);
  CHECK(rep.find("1753/625") != std::string::npos);
  CHECK(rep.find("E_J/h") != std::string::npos);
  CHECK(rep.find("B0") != std::string::npos);
  CHECK(rep.find("loop area ratio") != std::string::npos);

  NoiseFit nf;
  nf.model = {1e-22, 1.4, 1e-20, kTwoPi, 1.21e-22};
  nf.flicker_degenerate = true;
  const auto nrep = format_noise_report(nf, 140e-12);
  CHECK(nrep.find("11.000 pT") != std::string::npos);
  CHECK(nrep.find("DegenerateTerm: flicker") != std::string::npos);
}
