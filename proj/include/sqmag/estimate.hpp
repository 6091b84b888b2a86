#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sqmag/circuit.hpp"
#include "sqmag/fluxmap.hpp"
#include "sqmag/levmar.hpp"

namespace sqmag {

enum class Branch { Minus = 0, Plus = 1 };

struct SpectroscopyPoint {
  double ib = 0.0;    // A
  double freq = 0.0;  // Hz
  Branch branch = Branch::Minus;
  double weight = 1.0;
};

/// Index of each fit parameter in DeviceModel::to_array order.
enum class Param : int { L1, L2, C1, C2, Cs, R, D1, D2, Ip, I0, Ibc };
inline constexpr std::size_t kParamCount = 11;
using ParamArray = std::array<double, kParamCount>;

const char* param_name(Param p);
/// Display unit and its size in SI (pH -> 1e-12 and so on).
const char* param_unit(Param p);
double param_scale(Param p);

/// The eleven fitted quantities plus the externally measured small-loop area.
struct DeviceModel {
  double l1 = 0.0, l2 = 0.0;  // H
  double c1 = 0.0, c2 = 0.0;  // F
  double cs = 0.0;            // F, effective shunt
  double r = 1.0;             // A2 / A1
  double d1 = 0.0, d2 = 0.0;
  double ip = 0.0;   // A, bias period of loop 1
  double i0 = 0.0;   // A
  double ibc = 0.0;  // A
  double a1 = 50e-12;  // m^2, not fitted

  void validate() const;
  ParamArray to_array() const;
  static DeviceModel from_array(const ParamArray& values, double a1);
  double get(Param p) const { return to_array()[static_cast<int>(p)]; }

  CircuitParams circuit() const;
  FieldCalibration calibration() const;  // b = Phi0 / (Ip A1)
  double phi1(double ib) const { return (ib - i0) / ip; }
  double bias_at(double phi1) const { return i0 + phi1 * ip; }
};

struct ModelOptions {
  bool gap_suppression = true;
  double dark_threshold = kDefaultDarkThreshold;
};

/// Mode frequencies at coil current ib. Throws FieldAboveCritical when gap
/// suppression is enabled and |ib - I0| >= Ibc.
ModePair forward_mode(const DeviceModel& model, double ib, const ModelOptions& options = {});
ModePair forward_mode_at_flux(const DeviceModel& model, double phi1, const ModelOptions& options = {});
std::vector<ModePair> forward_spectrum(const DeviceModel& model, const std::vector<double>& ib,
                                       const ModelOptions& options = {});

/// Loop (1 or 2) whose bare frequency sits nearest the dressed minus mode.
int minus_mode_loop(const DeviceModel& model, double ib, const ModelOptions& options = {});

struct ParamBounds {
  ParamArray lower{};
  ParamArray upper{};
};

/// Generic physical bounds around an initial guess and the data's bias span.
ParamBounds default_bounds(const DeviceModel& init, const std::vector<SpectroscopyPoint>& data);

struct FitOptions {
  ModelOptions model;
  LmOptions lm;
  std::optional<ParamBounds> bounds;
  /// C1 and C2 are frozen by default: frequencies depend on the five circuit
  /// quantities only through Omega_10, Omega_20 and beta, so two of them
  /// must be anchored externally.
  std::array<bool, kParamCount> free{true, true, false, false, true, true, true, true, true, true, true};
  /// Fit growing bias windows around I0 (1/8, 1/4, 1/2, full span) so the
  /// period Ip locks before far-out data can wrap the phase.
  bool continuation = true;
  bool require_both_branches = true;
  std::size_t min_points = 50;
};

struct FitResult {
  DeviceModel params;
  DeviceModel initial;
  double residual_rms = 0.0;  // Hz, over the points used
  double cost = 0.0;
  std::size_t points_used = 0;
  std::size_t points_masked = 0;  // plus points dropped as dark
  int iterations = 0;
  bool converged = false;
  bool boundary_optimum = false;
  std::vector<Param> at_bound;
  std::array<bool, kParamCount> free{};
  /// Row-major 11 x 11 covariance in SI units; zero rows for frozen parameters.
  std::array<double, kParamCount * kParamCount> covariance{};
  ParamArray sigma{};
  /// Singular values of the weighted Jacobian over free parameters (scaled
  /// units), largest first; exposes near-degenerate combinations.
  std::vector<double> singular_values;

  double cov(Param a, Param b) const {
    return covariance[static_cast<int>(a) * kParamCount + static_cast<int>(b)];
  }
};

/// Weighted least squares of both branches over the free parameters.
/// Throws InvalidArgument on unusable data and NonConvergence when the
/// iteration cap is hit on the full data set.
FitResult fit_spectrum(const std::vector<SpectroscopyPoint>& data, const DeviceModel& init,
                       const FitOptions& options = {});

struct DerivedQuantities {
  DerivedEnergies energies;
  double b = 0.0;         // T/A
  double b0 = 0.0;        // T
  double b0_sigma = 0.0;  // T
  double bc = 0.0;        // T
};

/// Offset field B0 = b I0 with b = Phi0 / (Ip A1). The uncertainty uses the
/// (Ip, I0) block of the fit covariance.
std::pair<double, double> offset_field(const FitResult& fit);
DerivedQuantities derived_quantities(const FitResult& fit);
DerivedQuantities derived_quantities(const DeviceModel& model);

struct FluxObservation {
  double f_minus = 0.0;  // Hz
  std::optional<double> f_plus;
  /// Local slope df_minus/dphi1 in Hz per flux quantum. The static response
  /// is even in phi1, so only a slope can tell phi1 from -phi1.
  std::optional<double> minus_slope;
};

struct InvertOptions {
  ModelOptions model;
  double tol = 1e6;  // Hz
  double grid_step = 1e-3;
  double merge_distance = 1e-4;
  /// Search window in phi1. Default: [-W, W] with a slope hint, [0, W]
  /// otherwise, W = min(M / 2, 0.999 Ibc / Ip).
  std::optional<std::pair<double, double>> window;
  /// With a slope hint, also require |slope_model - slope_obs| <= this
  /// fraction of |slope_obs|. Unset: only the sign of the hint is used.
  std::optional<double> slope_rel_tol;
  double period_tol = kDefaultPeriodTolerance;
  std::int64_t period_max_denominator = kDefaultMaxDenominator;
};

struct FluxCandidate {
  double phi1 = 0.0;
  double phi2 = 0.0;
  double field = 0.0;     // T, b (ib - I0)
  double residual = 0.0;  // Hz, root of the summed squared mismatch
  bool unique = false;
  /// -phi1 matches equally well; set when no slope hint was supplied.
  bool mirror_ambiguous = false;
};

/// Throws NoCandidate when nothing in the window reproduces the observation within tol.
std::vector<FluxCandidate> invert_flux(const DeviceModel& model, const FluxObservation& obs,
                                       const InvertOptions& options = {});

}  // namespace sqmag
