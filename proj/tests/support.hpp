#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <vector>

#include "sqmag/circuit.hpp"
#include "sqmag/estimate.hpp"
#include "sqmag/fluxmap.hpp"

namespace sqmag::testing {

// Fitted device values, SI units.
inline CircuitParams fitted_circuit() {
  CircuitParams p;
  p.squid1 = {322e-12, 0.149, 722e-15, 50e-12};
  p.squid2 = {324e-12, 0.184, 718e-15, 50e-12 * 2.8048};
  p.cshunt = 71e-15;
  return p;
}

inline double rel_err(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  double log_uniform(double lo, double hi) { return std::exp(uniform(std::log(lo), std::log(hi))); }
  std::int64_t integer(std::int64_t lo, std::int64_t hi) {
    return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
  }
  double normal(double sigma = 1.0) { return std::normal_distribution<double>(0.0, sigma)(rng); }

  CircuitParams circuit() {
    CircuitParams p;
    p.squid1 = {log_uniform(100e-12, 1e-9), uniform(0.0, 0.5), log_uniform(100e-15, 2e-12), 50e-12};
    p.squid2 = {log_uniform(100e-12, 1e-9), uniform(0.0, 0.5), log_uniform(100e-15, 2e-12), 140e-12};
    p.cshunt = log_uniform(1e-15, 500e-15);
    return p;
  }
};

// Independent root finder: the shunted-branch susceptance is a Foster function
// with poles at 0, at the series resonance of the SQUID pair, and at infinity,
// so each of the two intervals holds exactly one zero.
struct BranchRoots {
  double omega_minus;
  double omega_plus;
};

inline double branch_susceptance(const CircuitParams& p, double l1, double l2, double w) {
  const double b1 = w * p.squid1.c - 1.0 / (w * l1);
  const double b2 = w * p.squid2.c - 1.0 / (w * l2);
  // series combination of two purely imaginary admittances j b1, j b2
  return w * p.cshunt + b1 * b2 / (b1 + b2);
}

inline double bisect(const CircuitParams& p, double l1, double l2, double lo, double hi) {
  double flo = branch_susceptance(p, l1, l2, lo);
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = branch_susceptance(p, l1, l2, mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

inline BranchRoots branch_roots(const CircuitParams& p, double l1, double l2) {
  const double ws = std::sqrt((1.0 / l1 + 1.0 / l2) / (p.squid1.c + p.squid2.c));
  return {bisect(p, l1, l2, ws * 1e-4, ws * (1.0 - 1e-13)),
          bisect(p, l1, l2, ws * (1.0 + 1e-13), ws * 1e4)};
}

// Fitted eleven-parameter model (SEM area A1 = 50 um^2).
inline DeviceModel fitted_model() {
  return {322e-12, 324e-12, 722e-15, 718e-15, 71e-15, 2.8048, 0.149, 0.184, 0.782e-3, 418e-9, 19.2e-3, 50e-12};
}

// Starting guesses fed to the fit; capacitances anchored at the fitted values.
inline DeviceModel initial_model() {
  return {360e-12, 360e-12, 722e-15, 718e-15, 62e-15, 2.8, 0.14, 0.14, 0.83e-3, 100e-9, 20e-3, 50e-12};
}

// Both branches on an even bias grid; dark plus points are left out.
inline std::vector<SpectroscopyPoint> synthetic_sweep(const DeviceModel& m, int n, double half_span,
                                                      double sigma_hz, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::vector<SpectroscopyPoint> out;
  for (int i = 0; i < n; ++i) {
    const double ib = -half_span + 2.0 * half_span * i / (n - 1);
    const ModePair modes = forward_mode(m, ib);
    out.push_back({ib, modes.f_minus + sigma_hz * noise(rng), Branch::Minus, 1.0});
    if (modes.plus_visible) out.push_back({ib, modes.f_plus + sigma_hz * noise(rng), Branch::Plus, 1.0});
  }
  return out;
}

inline double minus_slope(const DeviceModel& m, double phi1, double h = 1e-5) {
  return (forward_mode_at_flux(m, phi1 + h).f_minus - forward_mode_at_flux(m, phi1 - h).f_minus) / (2 * h);
}

}  // namespace sqmag::testing
