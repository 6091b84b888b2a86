#include "doctest.h"

#include <cmath>

#include "sqmag/circuit.hpp"
#include "sqmag/constants.hpp"
#include "sqmag/error.hpp"
#include "support.hpp"

using namespace sqmag;
using sqmag::testing::rel_err;

TEST_CASE("flux quantum is h over 2e") {
  CHECK(rel_err(kFluxQuantum, PhysicalConstants::planck / (2 * PhysicalConstants::electron_charge)) < 1e-15);
  CHECK(kFluxQuantum == doctest::Approx(2.067833848e-15).epsilon(1e-9));
}

TEST_CASE("josephson inductance examples") {
  SquidElement s{322e-12, 0.149, 722e-15, 50e-12};
  CHECK(josephson_inductance(s, 0.0) == doctest::Approx(322e-12).epsilon(1e-14));
  CHECK(josephson_inductance(s, 0.5) == doctest::Approx(322e-12 / 0.149).epsilon(1e-12));
  // the tan form a hair away from the half-integer point
  const double eps = 1e-8;
  for (double phi : {0.5 - eps, 0.5 + eps}) {
    const double t = std::tan(kPi * phi);
    const double direct = 322e-12 / (std::abs(std::cos(kPi * phi)) * std::sqrt(1 + 0.149 * 0.149 * t * t));
    CHECK(rel_err(josephson_inductance(s, phi), direct) < 1e-9);
  }
  SquidElement unit{1.0, 0.0, 1.0, 1.0};
  CHECK(josephson_inductance(unit, 0.25) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(josephson_inductance(unit, 0.5), Error);
  CHECK_THROWS_AS(josephson_inductance(unit, -1.5), Error);
  try {
    josephson_inductance(unit, 0.5);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DivergentInductance);
  }
}

TEST_CASE("critical current examples") {
  SquidElement s{322e-12, 0.0, 722e-15, 50e-12};
  CHECK(critical_current(s, 0.0) == doctest::Approx(1.0220e-6).epsilon(1e-3));
  CHECK(critical_current(s, 0.5) == doctest::Approx(0.0).epsilon(1e-20));
  // d = 0 reduces to 2 Ic |cos(pi phi)|
  for (double phi = -2.0; phi <= 2.0; phi += 0.0371)
    CHECK(critical_current(s, phi) ==
          doctest::Approx(critical_current(s, 0.0) * std::abs(std::cos(kPi * phi))).epsilon(1e-12));
}

TEST_CASE("inductance and critical current are dual") {
  sqmag::testing::Gen g(11);
  for (int i = 0; i < 2000; ++i) {
    SquidElement s{g.log_uniform(1e-12, 1e-8), g.uniform(1e-3, 0.99), 1e-15, 1e-12};
    const double phi = g.uniform(-20, 20);
    CHECK(rel_err(critical_current(s, phi) * josephson_inductance(s, phi), kFluxQuantum / kTwoPi) < 1e-12);
  }
}

TEST_CASE("josephson inductance is even and unit periodic") {
  sqmag::testing::Gen g(12);
  for (int i = 0; i < 2000; ++i) {
    SquidElement s{g.log_uniform(1e-12, 1e-8), g.uniform(0.0, 0.99), 1e-15, 1e-12};
    const double phi = g.uniform(-5, 5);
    if (s.d < 1e-3 && std::abs(std::abs(wrap_flux(phi)) - 0.5) < 1e-3) continue;
    const double l = josephson_inductance(s, phi);
    CHECK(rel_err(josephson_inductance(s, phi + 1.0), l) < 1e-9);
    CHECK(rel_err(josephson_inductance(s, -phi), l) < 1e-12);
  }
}

TEST_CASE("bare frequency examples") {
  CHECK(bare_angular_frequency(1.0, 1.0, 0.0) == doctest::Approx(1.0));
  const double f_shunted = bare_angular_frequency(322e-12, 722e-15, 71e-15) / kTwoPi;
  CHECK(f_shunted == doctest::Approx(9.95e9).epsilon(5e-3));
  const double f_pl = bare_angular_frequency(322e-12, 722e-15, 0.0) / kTwoPi;
  CHECK(f_pl == doctest::Approx(10.438e9).epsilon(1e6 / 10.438e9));
}

TEST_CASE("coupling beta") {
  auto p = sqmag::testing::fitted_circuit();
  // direct evaluation: 1 - 71^2 / (793 * 789)
  CHECK(coupling_beta(p) == doctest::Approx(1.0 - 5041.0 / (793.0 * 789.0)).epsilon(1e-14));
  CHECK(coupling_beta(p) == doctest::Approx(0.991943).epsilon(1e-6));
  p.cshunt = 0.0;
  CHECK(coupling_beta(p) == 1.0);
  p.squid2.c = p.squid1.c;
  p.cshunt = 50e-15;
  const double ratio = 50e-15 / (p.squid1.c + 50e-15);
  CHECK(coupling_beta(p) == doctest::Approx(1 - ratio * ratio).epsilon(1e-14));
}

TEST_CASE("fitted device sits near 10 GHz at zero flux") {
  const auto p = sqmag::testing::fitted_circuit();
  const auto m = eigenfrequencies(p, p.squid1.lj0, p.squid2.lj0);
  CHECK(m.f_minus >= 9.5e9);
  CHECK(m.f_plus <= 10.5e9);
  CHECK(m.f_minus <= m.f_plus);
  const auto roots = sqmag::testing::branch_roots(p, p.squid1.lj0, p.squid2.lj0);
  CHECK(rel_err(m.f_minus, roots.omega_minus / kTwoPi) < 1e-9);
  CHECK(rel_err(m.f_plus, roots.omega_plus / kTwoPi) < 1e-9);
}

TEST_CASE("closed form matches the branch root oracle on random circuits") {
  sqmag::testing::Gen g(2024);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto p = g.circuit();
    const double l1 = p.squid1.lj0 * g.uniform(1.0, 5.0);
    const double l2 = p.squid2.lj0 * g.uniform(1.0, 5.0);
    const auto m = eigenfrequencies(p, l1, l2);
    const auto roots = sqmag::testing::branch_roots(p, l1, l2);
    worst = std::max({worst, rel_err(kTwoPi * m.f_minus, roots.omega_minus),
                      rel_err(kTwoPi * m.f_plus, roots.omega_plus)});
    CHECK(m.f_minus <= m.f_plus);
    CHECK(m.f_minus > 0.0);
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("symmetric circuit reduces to series and parallel limits") {
  sqmag::testing::Gen g(5);
  for (int i = 0; i < 200; ++i) {
    CircuitParams p;
    const double l = g.log_uniform(100e-12, 1e-9), c = g.log_uniform(100e-15, 2e-12);
    p.squid1 = {l, 0.1, c, 1e-12};
    p.squid2 = {l, 0.1, c, 2e-12};
    p.cshunt = g.log_uniform(1e-15, 1e-12);
    const auto m = eigenfrequencies(p, l, l);
    CHECK(rel_err(m.f_plus, 1.0 / (kTwoPi * std::sqrt(l * c))) < 1e-12);
    CHECK(rel_err(m.f_minus, 1.0 / (kTwoPi * std::sqrt(l * (c + 2 * p.cshunt)))) < 1e-12);
    CHECK_FALSE(m.plus_visible);
    CHECK(m.minus_visible);
  }
}

TEST_CASE("dark mode threshold") {
  auto p = sqmag::testing::fitted_circuit();
  const double l1 = p.squid1.lj0;
  // tune L2 so the bare frequencies coincide
  const double l2 = l1 * (p.squid1.c + p.cshunt) / (p.squid2.c + p.cshunt);
  CHECK_FALSE(eigenfrequencies(p, l1, l2).plus_visible);
  CHECK_FALSE(eigenfrequencies(p, l1, l2 * 1.019).plus_visible);
  CHECK(eigenfrequencies(p, l1, l2 * 1.021).plus_visible);
  EigenOptions loose;
  loose.dark_threshold = 0.0;
  CHECK(eigenfrequencies(p, l1, l2 * 1.001, loose).plus_visible);
}

TEST_CASE("decoupling limit approaches bare modes monotonically") {
  auto p = sqmag::testing::fitted_circuit();
  const double l1 = p.squid1.lj0, l2 = 1.3 * p.squid2.lj0;
  double prev = 1e300;
  for (double cs = 100e-15; cs > 1e-21; cs /= 3.0) {
    p.cshunt = cs;
    const auto m = eigenfrequencies(p, l1, l2);
    const double f1 = bare_angular_frequency(l1, p.squid1.c, cs) / kTwoPi;
    const double f2 = bare_angular_frequency(l2, p.squid2.c, cs) / kTwoPi;
    const double dev = std::max(std::abs(m.f_plus - std::max(f1, f2)) / m.f_plus,
                                std::abs(m.f_minus - std::min(f1, f2)) / m.f_minus);
    CHECK(dev <= prev);
    prev = dev;
  }
  CHECK(prev < 1e-12);
}

TEST_CASE("input impedance") {
  const auto p = sqmag::testing::fitted_circuit();
  const double l1 = p.squid1.lj0, l2 = p.squid2.lj0;
  const double cc = 20e-15;
  CHECK(std::abs(input_impedance(p, l1, l2, 1e3, cc)) > 1e9);
  CHECK(std::abs(input_impedance(p, l1, l2, 1e-3, cc)) > std::abs(input_impedance(p, l1, l2, 1e3, cc)));
  // impedance is purely reactive in the lossless model
  CHECK(std::abs(input_impedance(p, l1, l2, 2e10, cc).real()) < 1e-9);

  // branch susceptance changes sign across the closed-form minus mode
  const auto m = eigenfrequencies(p, l1, l2);
  const double w = kTwoPi * m.f_minus;
  const double below = shunted_branch_admittance(p, l1, l2, w * (1 - 1e-9)).imag();
  const double above = shunted_branch_admittance(p, l1, l2, w * (1 + 1e-9)).imag();
  CHECK(below < 0.0);
  CHECK(above > 0.0);

  // symmetric circuit: each SQUID admittance vanishes at 1/sqrt(LC)
  CircuitParams sym = p;
  sym.squid2 = sym.squid1;
  const double w0 = 1.0 / std::sqrt(sym.squid1.lj0 * sym.squid1.c);
  const auto ysq_near = squid_series_admittance(sym, sym.squid1.lj0, sym.squid1.lj0, w0 * (1 + 1e-7));
  const auto ysq_far = squid_series_admittance(sym, sym.squid1.lj0, sym.squid1.lj0, w0 * 1.1);
  CHECK(std::abs(ysq_near) < 1e-5 * std::abs(ysq_far));

  CHECK_THROWS_AS(input_impedance(p, l1, l2, w, 0.0), Error);
  CHECK_THROWS_AS(input_impedance(p, l1, l2, -1.0, cc), Error);
}

TEST_CASE("derived energies of the fitted device") {
  const auto e = derived_energies(sqmag::testing::fitted_circuit());
  CHECK(e.ec1 == doctest::Approx(24.6e6).epsilon(0.1e6 / 24.6e6));
  CHECK(e.ec2 == doctest::Approx(24.7e6).epsilon(0.1e6 / 24.7e6));
  CHECK(e.ej1 == doctest::Approx(507e9).epsilon(1e9 / 507e9));
  CHECK(e.ej2 == doctest::Approx(504e9).epsilon(1e9 / 504e9));
  CHECK(e.fpl1 == doctest::Approx(10.438e9).epsilon(1e6 / 10.438e9));
  CHECK(e.fpl2 == doctest::Approx(10.435e9).epsilon(1e6 / 10.435e9));
  CHECK(e.anharmonicity1 == -e.ec1);
  CHECK(e.ej1 / e.ec1 > 1e4);
  CHECK(e.ej2 / e.ec2 > 1e4);
  CHECK(e.transmon1);
  CHECK(e.transmon2);
}

TEST_CASE("parameter validation") {
  auto p = sqmag::testing::fitted_circuit();
  CHECK_NOTHROW(p.validate());
  p.squid1.d = 1.0;
  CHECK_THROWS_AS(p.validate(), Error);
  p = sqmag::testing::fitted_circuit();
  p.cshunt = -1e-15;
  CHECK_THROWS_AS(p.validate(), Error);
  p = sqmag::testing::fitted_circuit();
  p.squid2.lj0 = 0.0;
  CHECK_THROWS_AS(derived_energies(p), Error);
}
