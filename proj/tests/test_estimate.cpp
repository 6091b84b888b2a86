#include "doctest.h"

#include <cmath>

#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"
#include "sqmag/estimate.hpp"
#include "support.hpp"

using namespace sqmag;
using sqmag::testing::fitted_model;
using sqmag::testing::initial_model;
using sqmag::testing::rel_err;
using sqmag::testing::synthetic_sweep;

namespace {

ModelOptions no_gap() {
  ModelOptions o;
  o.gap_suppression = false;
  return o;
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Internal;
}

}  // namespace

TEST_CASE("parameter table plumbing") {
  const auto m = fitted_model();
  const auto round = DeviceModel::from_array(m.to_array(), m.a1);
  CHECK(round.to_array() == m.to_array());
  CHECK(std::string(param_name(Param::Ibc)) == "Ibc");
  CHECK(std::string(param_unit(Param::I0)) == "nA");
  CHECK(param_scale(Param::Cs) == 1e-15);
  CHECK(m.get(Param::R) == 2.8048);
  CHECK(m.circuit().squid2.area == doctest::Approx(2.8048 * 50e-12));
  CHECK(m.calibration().b == doctest::Approx(52.886e-3).epsilon(1e-4));
}

TEST_CASE("forward spectrum examples") {
  const auto m = fitted_model();
  const auto zero = forward_mode(m, m.i0);
  CHECK(zero.f_minus >= 9.5e9);
  CHECK(zero.f_plus <= 10.5e9);
  CHECK(forward_mode(m, m.bias_at(0.5)).f_minus < zero.f_minus);
  // the zero-flux point is the global maximum of both modes
  for (double phi = -7.5; phi <= 7.5; phi += 0.01) {
    const auto modes = forward_mode_at_flux(m, phi);
    CHECK(modes.f_minus <= zero.f_minus * (1 + 1e-12));
    CHECK(modes.f_plus <= zero.f_plus * (1 + 1e-12));
  }

  // rational period 1753/625 with gap suppression off
  for (double ib : {-3e-3, -0.4e-3, 0.1e-3, 2.5e-3}) {
    const double a = forward_mode(m, ib, no_gap()).f_minus;
    const double b = forward_mode(m, ib + 625 * m.ip, no_gap()).f_minus;
    CHECK(rel_err(b, a) < 1e-9);
  }

  CHECK(code_of([&] { forward_mode(m, m.i0 + m.ibc); }) == ErrorCode::FieldAboveCritical);
  CHECK_NOTHROW(forward_mode(m, m.i0 + 2 * m.ibc, no_gap()));
  CHECK(forward_spectrum(m, {0.0, 1e-3, 2e-3}).size() == 3);
}

TEST_CASE("f_minus is periodic and even only over the full modulation period") {
  for (auto [a, b] : {std::pair{8, 3}, std::pair{14, 5}, std::pair{7, 2}}) {
    auto m = fitted_model();
    m.r = static_cast<double>(a) / b;
    double worst_period = 0.0, worst_even = 0.0;
    std::vector<double> shift_dev(b, 0.0);
    for (double phi = 0.0; phi < b; phi += 1e-3) {
      const double f = forward_mode_at_flux(m, phi, no_gap()).f_minus;
      worst_period = std::max(worst_period, std::abs(forward_mode_at_flux(m, phi + b, no_gap()).f_minus - f));
      worst_even = std::max(worst_even, std::abs(forward_mode_at_flux(m, -phi, no_gap()).f_minus - f));
      for (int k = 1; k < b; ++k)
        shift_dev[k] = std::max(shift_dev[k], std::abs(forward_mode_at_flux(m, phi + k, no_gap()).f_minus - f));
    }
    CHECK(worst_period < 1.0);  // Hz
    CHECK(worst_even < 1.0);
    for (int k = 1; k < b; ++k) CHECK(shift_dev[k] > 1e6);
  }
}

TEST_CASE("absolute loop area is not identifiable from frequencies") {
  const auto m = fitted_model();
  for (double s : {0.5, 2.0, 7.3}) {
    auto scaled = m;
    scaled.a1 *= s;
    CHECK(scaled.calibration().b == doctest::Approx(m.calibration().b / s).epsilon(1e-13));
    for (double ib = -10e-3; ib <= 10e-3; ib += 0.37e-3) {
      CHECK(forward_mode(scaled, ib).f_minus == forward_mode(m, ib).f_minus);
      CHECK(forward_mode(scaled, ib).f_plus == forward_mode(m, ib).f_plus);
    }
  }
}

TEST_CASE("mode attribution at the noise bias point picks the large loop") {
  const auto m = fitted_model();
  CHECK(minus_mode_loop(m, m.bias_at(0.073)) == 2);
}

TEST_CASE("offset field and derived quantities") {
  auto m = fitted_model();
  const auto d = derived_quantities(m);
  CHECK(d.b == doctest::Approx(52.9e-3).epsilon(1e-3));
  CHECK(d.b0 == doctest::Approx(22.1e-9).epsilon(1e-2));
  CHECK(d.bc == doctest::Approx(1.02e-3).epsilon(5e-3));
  CHECK(d.energies.fpl1 == doctest::Approx(10.438e9).epsilon(1e-4));

  FitResult fit;
  fit.params = m;
  fit.params.i0 = 0.0;
  CHECK(offset_field(fit).first == 0.0);
  CHECK(offset_field(fit).second == 0.0);

  // uncertainty from the (Ip, I0) block alone
  fit.params = m;
  fit.covariance[static_cast<int>(Param::I0) * kParamCount + static_cast<int>(Param::I0)] = 1e-18;
  const auto [b0, sigma] = offset_field(fit);
  CHECK(b0 == doctest::Approx(d.b0));
  CHECK(sigma == doctest::Approx(d.b * 1e-9).epsilon(1e-12));
}

TEST_CASE("noiseless fit started at the truth stops immediately") {
  const auto truth = fitted_model();
  const auto data = synthetic_sweep(truth, 400, 12e-3, 0.0, 1);
  const auto fit = fit_spectrum(data, truth);
  CHECK(fit.converged);
  CHECK(fit.residual_rms < 1.0);
  CHECK(fit.iterations <= 3);
  CHECK_FALSE(fit.boundary_optimum);
}

TEST_CASE("noisy sweep round trip") {
  const auto truth = fitted_model();
  const auto data = synthetic_sweep(truth, 400, 12e-3, 1e6, 42);
  const auto fit = fit_spectrum(data, initial_model());
  CHECK(fit.converged);
  CHECK(std::abs(fit.params.r - 2.8048) < 1e-3);
  CHECK(std::abs(fit.params.i0 - 418e-9) < 10e-9);
  CHECK(std::abs(fit.params.l1 - 322e-12) < 2e-12);
  CHECK(std::abs(fit.params.l2 - 324e-12) < 2e-12);
  CHECK(fit.residual_rms == doctest::Approx(1e6).epsilon(0.1));
  CHECK(fit.points_used > 700);
  // covariance is symmetric with non-negative diagonal; frozen rows are zero
  for (std::size_t i = 0; i < kParamCount; ++i) {
    CHECK(fit.covariance[i * kParamCount + i] >= 0.0);
    for (std::size_t j = 0; j < kParamCount; ++j)
      CHECK(fit.covariance[i * kParamCount + j] == doctest::Approx(fit.covariance[j * kParamCount + i]));
  }
  CHECK(fit.sigma[static_cast<int>(Param::C1)] == 0.0);
  CHECK(fit.params.c1 == truth.c1);
}

TEST_CASE("noiseless round trips from perturbed parameter sets") {
  sqmag::testing::Gen g(77);
  for (int trial = 0; trial < 20; ++trial) {
    ParamArray v = fitted_model().to_array();
    for (auto& x : v) x *= g.uniform(0.8, 1.2);
    const auto truth = DeviceModel::from_array(v, 50e-12);
    const auto data = synthetic_sweep(truth, 400, 12e-3, 0.0, 0);
    ParamArray start = v;
    for (std::size_t i = 0; i < kParamCount; ++i)
      if (i != static_cast<std::size_t>(Param::C1) && i != static_cast<std::size_t>(Param::C2))
        start[i] *= g.uniform(0.95, 1.05);
    const auto fit = fit_spectrum(data, DeviceModel::from_array(start, 50e-12));
    const auto got = fit.params.to_array();
    double worst = 0.0;
    for (std::size_t i = 0; i < kParamCount; ++i) worst = std::max(worst, rel_err(got[i], v[i]));
    INFO("trial " << trial << " rms " << fit.residual_rms << " Hz");
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("fit uncertainties cover the truth") {
  const auto truth = fitted_model();
  const auto tv = truth.to_array();
  std::array<int, kParamCount> covered{};
  int fits = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto data = synthetic_sweep(truth, 400, 12e-3, 1e6, 1000 + trial);
    const auto fit = fit_spectrum(data, initial_model());
    const auto got = fit.params.to_array();
    for (std::size_t i = 0; i < kParamCount; ++i)
      if (std::abs(got[i] - tv[i]) <= fit.sigma[i]) ++covered[i];
    ++fits;
  }
  int pooled = 0, slots = 0;
  for (std::size_t i = 0; i < kParamCount; ++i) {
    if (!FitOptions{}.free[i]) continue;
    INFO(param_name(static_cast<Param>(i)) << " covered " << covered[i] << "/" << fits);
    CHECK(covered[i] >= 45);
    pooled += covered[i];
    slots += fits;
  }
  CHECK(static_cast<double>(pooled) / slots >= 0.6);
}

TEST_CASE("circuit capacitances form a two dimensional null space") {
  const auto truth = fitted_model();
  const auto data = synthetic_sweep(truth, 400, 12e-3, 0.0, 0);
  FitOptions all;
  all.free.fill(true);
  all.continuation = false;
  const auto fit = fit_spectrum(data, truth, all);
  REQUIRE(fit.singular_values.size() == 11);
  const double top = fit.singular_values.front();
  CHECK(fit.singular_values[8] > 1e-9 * top);
  CHECK(fit.singular_values[9] < 1e-12 * top);
  CHECK(fit.singular_values[10] < 1e-12 * top);

  // scaling all inductances up and all capacitances down leaves the spectrum unchanged
  auto scaled = truth;
  scaled.l1 *= 1.3;
  scaled.l2 *= 1.3;
  scaled.c1 /= 1.3;
  scaled.c2 /= 1.3;
  scaled.cs /= 1.3;
  for (double ib = -10e-3; ib <= 10e-3; ib += 0.41e-3)
    CHECK(rel_err(forward_mode(scaled, ib).f_minus, forward_mode(truth, ib).f_minus) < 1e-12);
}

TEST_CASE("minus branch alone still pins the shunt once capacitances are anchored") {
  const auto truth = fitted_model();
  std::vector<SpectroscopyPoint> minus;
  for (const auto& p : synthetic_sweep(truth, 400, 12e-3, 1e6, 5))
    if (p.branch == Branch::Minus) minus.push_back(p);
  CHECK(code_of([&] { fit_spectrum(minus, initial_model()); }) == ErrorCode::InvalidArgument);

  FitOptions single;
  single.require_both_branches = false;
  const auto fit = fit_spectrum(minus, initial_model(), single);
  CHECK(fit.converged);
  CHECK_FALSE(fit.boundary_optimum);
  CHECK(std::abs(fit.params.cs - truth.cs) < 0.5e-15);

  // freeing the capacitances exposes the gauge degeneracy on either data set
  FitOptions all = single;
  all.free.fill(true);
  all.continuation = false;
  const auto loose = fit_spectrum(minus, truth, all);
  CHECK(loose.singular_values.back() < 1e-12 * loose.singular_values.front());
}

TEST_CASE("fit input validation and iteration cap") {
  const auto truth = fitted_model();
  CHECK(code_of([&] { fit_spectrum({}, truth); }) == ErrorCode::InvalidArgument);
  auto few = synthetic_sweep(truth, 20, 12e-3, 0.0, 0);
  CHECK(code_of([&] { fit_spectrum(few, truth); }) == ErrorCode::InvalidArgument);
  auto bad = synthetic_sweep(truth, 100, 12e-3, 0.0, 0);
  bad[3].weight = -1.0;
  CHECK(code_of([&] { fit_spectrum(bad, truth); }) == ErrorCode::InvalidArgument);

  FitOptions capped;
  capped.lm.max_iterations = 2;
  const auto data = synthetic_sweep(truth, 400, 12e-3, 1e6, 3);
  CHECK(code_of([&] { fit_spectrum(data, initial_model(), capped); }) == ErrorCode::NonConvergence);
}

TEST_CASE("parameters pinned at a bound are reported") {
  const auto truth = fitted_model();
  const auto data = synthetic_sweep(truth, 400, 12e-3, 1e6, 9);
  auto bounds = default_bounds(initial_model(), data);
  bounds.upper[static_cast<int>(Param::D2)] = 0.16;
  FitOptions o;
  o.bounds = bounds;
  const auto fit = fit_spectrum(data, initial_model(), o);
  CHECK(fit.boundary_optimum);
  REQUIRE(fit.at_bound.size() >= 1);
  CHECK(std::find(fit.at_bound.begin(), fit.at_bound.end(), Param::D2) != fit.at_bound.end());
  CHECK(fit.params.d2 == doctest::Approx(0.16));
}

TEST_CASE("flux inversion round trip") {
  const auto m = fitted_model();
  const double phi = 3.217;
  const auto modes = forward_mode_at_flux(m, phi);

  // the static response is even in phi1: without a slope the answer is folded
  const auto folded = invert_flux(m, {modes.f_minus, modes.f_plus, std::nullopt});
  REQUIRE(folded.size() == 1);
  CHECK(folded[0].phi1 == doctest::Approx(phi).epsilon(1e-3 / phi));
  CHECK(folded[0].unique);
  CHECK(folded[0].mirror_ambiguous);
  CHECK(folded[0].phi2 == doctest::Approx(2.8048 * folded[0].phi1));
  CHECK(folded[0].field == doctest::Approx(m.calibration().b * phi * m.ip).epsilon(1e-3));

  for (double truth : {phi, -phi}) {
    const auto mm = forward_mode_at_flux(m, truth);
    const auto c = invert_flux(m, {mm.f_minus, mm.f_plus, sqmag::testing::minus_slope(m, truth)});
    REQUIRE(c.size() == 1);
    CHECK(std::abs(c[0].phi1 - truth) < 1e-3);
    CHECK(c[0].unique);
    CHECK_FALSE(c[0].mirror_ambiguous);
    CHECK(c[0].residual < 1e3);
  }
}

TEST_CASE("one branch admits more candidates than two") {
  const auto m = fitted_model();
  const double phi = 3.217;
  const auto modes = forward_mode_at_flux(m, phi);
  const auto both = invert_flux(m, {modes.f_minus, modes.f_plus, std::nullopt});
  const auto single = invert_flux(m, {modes.f_minus, std::nullopt, std::nullopt});
  CHECK(single.size() > both.size());
}

TEST_CASE("integer area ratio leaves a unit flux ambiguity") {
  auto m = fitted_model();
  m.r = 2.0;
  InvertOptions o;
  o.model = no_gap();
  o.window = std::make_pair(-7.5, 7.5);
  const double phi = 0.31;
  const auto modes = forward_mode_at_flux(m, phi, o.model);
  const auto c = invert_flux(m, {modes.f_minus, std::nullopt, std::nullopt}, o);
  CHECK(c.size() > 2);
  for (const auto& x : c) CHECK_FALSE(x.unique);
  for (double k : {-1.0, 0.0, 1.0}) {
    bool hit = false;
    for (const auto& x : c) hit = hit || std::abs(x.phi1 - (phi + k)) < 1e-3;
    CHECK(hit);
  }
  // default window collapses to half a period for an integer ratio
  o.window.reset();
  const auto half = invert_flux(m, {modes.f_minus, std::nullopt, std::nullopt}, o);
  bool hit = false;
  for (const auto& x : half) {
    CHECK(x.phi1 >= 0.0);
    CHECK(x.phi1 <= 0.5);
    hit = hit || std::abs(x.phi1 - phi) < 1e-6;
  }
  CHECK(hit);
}

TEST_CASE("slope magnitude narrows the candidate set") {
  const auto m = fitted_model();
  sqmag::testing::Gen g(21);
  InvertOptions sign_only, magnitude;
  sign_only.window = magnitude.window = std::make_pair(-7.5, 7.5);
  magnitude.slope_rel_tol = 0.05;
  std::size_t n_sign = 0, n_mag = 0;
  for (int i = 0; i < 50; ++i) {
    const double phi = g.uniform(-7.5, 7.5);
    const auto modes = forward_mode_at_flux(m, phi);
    const FluxObservation obs{modes.f_minus, modes.f_plus, sqmag::testing::minus_slope(m, phi)};
    const auto a = invert_flux(m, obs, sign_only);
    const auto b = invert_flux(m, obs, magnitude);
    CHECK(b.size() <= a.size());
    n_sign += a.size();
    n_mag += b.size();
    bool truth_kept = false;
    for (const auto& x : b) truth_kept = truth_kept || std::abs(x.phi1 - phi) < 1e-3;
    CHECK(truth_kept);
  }
  CHECK(n_mag <= n_sign);
}

TEST_CASE("flux inversion errors") {
  const auto m = fitted_model();
  const auto top = forward_mode(m, m.i0);
  CHECK(code_of([&] { invert_flux(m, {top.f_minus * 1.01, std::nullopt, std::nullopt}); }) ==
        ErrorCode::NoCandidate);
  CHECK(code_of([&] { invert_flux(m, {-1.0, std::nullopt, std::nullopt}); }) == ErrorCode::InvalidArgument);
  InvertOptions o;
  o.window = std::make_pair(1.0, 1.0);
  CHECK(code_of([&] { invert_flux(m, {top.f_minus, std::nullopt, std::nullopt}, o); }) ==
        ErrorCode::InvalidArgument);
}
