#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "sqmag/estimate.hpp"
#include "sqmag/response.hpp"

namespace sqmag {

struct ComplexTrace {
  std::vector<std::complex<double>> samples;  // S11
  double dt = 0.0;                            // s
  double f_drive = 0.0;                       // Hz
  double p_in_dbm = 0.0;

  void validate() const;
};

struct FrequencyTrace {
  std::vector<double> samples;  // Hz
  double dt = 0.0;
  /// 1 where the measured point lay farther than the threshold from the model locus.
  std::vector<std::uint8_t> off_curve;
  std::size_t off_curve_count = 0;

  double duration() const { return dt * static_cast<double>(samples.size()); }
};

enum class DensityUnit { HertzPerRootHz, FluxQuantaPerRootHz, TeslaPerRootHz };
const char* density_unit_name(DensityUnit u);

/// One-sided amplitude spectral density on bins f_k = k / T, k = 1 .. N/2.
struct SpectralDensity {
  std::vector<double> freqs;      // Hz
  std::vector<double> amplitude;  // unit / sqrt(Hz)
  double bandwidth = 0.0;         // BW = 1 / (2 T)
  DensityUnit unit = DensityUnit::FluxQuantaPerRootHz;
  /// Number of periodograms averaged in power. 0 marks a density that is not
  /// a periodogram (no estimator bias correction in fits).
  std::size_t averages = 1;
};

/// S(f) = a / f^alpha + b Gamma^2 / ((2 pi f)^2 + Gamma^2) + s0, in unit^2 / Hz.
struct NoiseModel {
  double a = 0.0;
  double alpha = 1.0;
  double b_rtn = 0.0;
  double gamma_rtn = 0.0;  // rad/s
  double s0 = 0.0;

  double psd(double f) const;
  double flicker(double f) const;
  double telegraph(double f) const;
};

struct ExtractOptions {
  int grid_points = 4096;
  double span_gamma2 = 10.0;  // curve covers |Delta| <= span * Gamma2
  double off_curve_threshold = 0.5;
  int refine_passes = 2;      // shrinking parabola re-fits after the grid step
};

/// Nearest point on the model locus S11(Delta) for every sample;
/// f(t) = f_drive - Delta / 2 pi.
FrequencyTrace extract_frequency_trace(const ComplexTrace& trace, const ResonanceParams& res, double rabi,
                                       const ExtractOptions& options = {});

/// |DFT| / (sqrt(BW) |R|) with the 1/N-normalized forward DFT.
SpectralDensity flux_asd(const FrequencyTrace& trace, double responsivity);

/// Same estimator without the responsivity, in Hz / sqrt(Hz).
SpectralDensity frequency_asd(const FrequencyTrace& trace);

/// S_B = S_Phi * Phi0 / area.
SpectralDensity field_asd(const SpectralDensity& sphi, double area);

/// Power (not amplitude) average of densities on a common grid.
SpectralDensity average_densities(const std::vector<SpectralDensity>& densities);

/// df_minus / dphi1 by central differences at step h, cross-checked against
/// h / 2. Throws ZeroResponsivity near stationary points.
double responsivity(const DeviceModel& model, double phi1, const ModelOptions& options = {},
                    double step = 1e-4);
/// Plain central difference, no checks.
double responsivity_unchecked(const DeviceModel& model, double phi1, const ModelOptions& options = {},
                              double step = 1e-4);

struct NoiseFitOptions {
  LmOptions lm;
  int gamma_starts = 12;           // log-spaced start values for Gamma
  double degenerate_share = 0.05;  // a term never exceeding this share of S is flagged
  /// A term is also flagged when dropping it raises chi^2 by less than the
  /// (1 - p) quantile for the parameters it removes.
  double degenerate_p = 1e-3;
  double exact_rms = 1e-9;         // stop once the ln S residual rms falls below this
};

struct NoiseFit {
  NoiseModel model;
  double residual_rms = 0.0;  // in ln S
  bool converged = false;
  int iterations = 0;
  bool flicker_degenerate = false;
  bool telegraph_degenerate = false;
  bool white_degenerate = false;
  /// Crossover frequencies in Hz; NaN where the terms never meet.
  double crossover_flicker_white = 0.0;
  double crossover_telegraph_white = 0.0;
  double crossover_flicker_telegraph = 0.0;
};

/// Least squares in ln S over all bins. Needs >= 100 bins or >= 3 decades.
NoiseFit fit_noise_model(const SpectralDensity& sd, const NoiseFitOptions& options = {});

struct SynthOptions {
  /// Peak-to-peak telegraph splitting in trace units. <= 0: derive it from
  /// b_rtn and gamma_rtn so the telegraph spectrum equals the model term.
  double rtn_splitting = 0.0;
};

/// White + spectrally shaped 1/f^alpha + symmetric telegraph noise around
/// f_center. Each telegraph state is left at rate gamma_rtn / 2, which puts
/// the Lorentzian corner at gamma_rtn. Deterministic for a given seed.
FrequencyTrace synthesize_trace(const NoiseModel& model, double f_center, double duration, double dt,
                                std::uint64_t seed, const SynthOptions& options = {});

/// Maps a frequency trace through the reflection model at a fixed drive.
ComplexTrace reflect_trace(const FrequencyTrace& freq, const ResonanceParams& res, double f_drive,
                           double rabi, double p_in_dbm = 0.0);

}  // namespace sqmag
