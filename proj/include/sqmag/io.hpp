#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "sqmag/estimate.hpp"
#include "sqmag/noise.hpp"
#include "sqmag/response.hpp"

namespace sqmag {

/// Device description as stored on disk. Every number carries its unit in
/// the key name (L1_pH, Ip_mA, ...).
struct ParamFile {
  DeviceModel model;
  double a2 = 0.0;  // m^2, loop-2 area used for field conversion
  std::optional<ResonanceParams> resonance;
  std::optional<double> attenuation_db;
  std::optional<double> rabi;  // rad/s
  bool gap_suppression = true;
  std::optional<std::array<bool, kParamCount>> free;

  /// Area of the loop that carries the minus mode at this flux.
  double mode_area(double phi1) const;
};

/// Rounds to 12 significant digits, the precision of every text writer.
double round12(double x);

ParamFile parse_param_json(const std::string& text);
std::string format_param_json(const ParamFile& p);

/// Parsed delimited text: a header row of column names, data rows, and the
/// "# key=value" metadata lines. Other lines starting with '#' are comments.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<int> line_numbers;  // 1-based source line of each row
  std::map<std::string, std::string> meta;
};
Table parse_table(const std::string& text);

std::vector<SpectroscopyPoint> parse_sweep_csv(const std::string& text);
std::string format_sweep_csv(const std::vector<SpectroscopyPoint>& points);

struct TraceFile {
  bool has_s11 = true;
  ComplexTrace s11;     // t_s, re_s11, im_s11
  FrequencyTrace freq;  // t_s, f_GHz
  double f_drive = 0.0;
  double p_in_dbm = 0.0;
};
TraceFile parse_trace_csv(const std::string& text);
std::string format_trace_csv(const ComplexTrace& trace);
std::string format_trace_csv(const FrequencyTrace& trace);

/// f_Hz, sphi, sb on a common grid.
struct SpectrumFile {
  SpectralDensity sphi;
  SpectralDensity sb;
};
SpectrumFile parse_spectrum_csv(const std::string& text);
std::string format_spectrum_csv(const SpectralDensity& sphi, const SpectralDensity& sb);

/// p_in_dbm, omega_r_MHz (Omega_R / 2 pi).
std::vector<RabiPowerPoint> parse_rabi_csv(const std::string& text);
std::string format_rabi_csv(const std::vector<RabiPowerPoint>& points);

std::string format_fit_report(const FitResult& fit);
std::string format_noise_report(const NoiseFit& fit_field, double area);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sqmag
