/* C interface to the two-SQUID magnetometer toolkit.
 *
 * All physical quantities are SI unless a name says otherwise. Every call
 * returns a status; on failure sqmag_last_error() holds a message for the
 * calling thread. Handles are opaque and owned by the caller. */
#ifndef SQMAG_H
#define SQMAG_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SQMAG_API __declspec(dllexport)
#else
#define SQMAG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sqmag_status {
  SQMAG_OK = 0,
  SQMAG_ERR_INVALID_ARGUMENT = 1,
  SQMAG_ERR_PARSE = 2,
  SQMAG_ERR_IO = 3,
  SQMAG_ERR_DIVERGENT_INDUCTANCE = 10,
  SQMAG_ERR_POLE_PROXIMITY = 11,
  SQMAG_ERR_FIELD_ABOVE_CRITICAL = 12,
  SQMAG_ERR_NO_RATIONAL_WITHIN_BOUND = 13,
  SQMAG_ERR_NON_CONVERGENCE = 14,
  SQMAG_ERR_NO_CANDIDATE = 15,
  SQMAG_ERR_ZERO_RESPONSIVITY = 16,
  SQMAG_ERR_INSUFFICIENT_SPAN = 17,
  SQMAG_ERR_SLOPE_MISMATCH = 18,
  SQMAG_ERR_INTERNAL = 99
} sqmag_status;

/* Order of the eleven fit parameters. */
typedef enum sqmag_param {
  SQMAG_L1 = 0, SQMAG_L2, SQMAG_C1, SQMAG_C2, SQMAG_CS, SQMAG_R,
  SQMAG_D1, SQMAG_D2, SQMAG_IP, SQMAG_I0, SQMAG_IBC
} sqmag_param;
#define SQMAG_PARAM_COUNT 11

typedef struct sqmag_device sqmag_device;
typedef struct sqmag_sweep sqmag_sweep;
typedef struct sqmag_fit sqmag_fit;
typedef struct sqmag_candidates sqmag_candidates;
typedef struct sqmag_trace sqmag_trace;
typedef struct sqmag_spectrum sqmag_spectrum;

SQMAG_API const char* sqmag_status_string(sqmag_status status);
SQMAG_API const char* sqmag_last_error(void);
SQMAG_API const char* sqmag_param_name(sqmag_param p);
SQMAG_API const char* sqmag_param_unit(sqmag_param p);
SQMAG_API double sqmag_param_scale(sqmag_param p);
/* Releases strings returned through char** out-parameters. */
SQMAG_API void sqmag_string_free(char* s);

/* ---- device ---------------------------------------------------------- */

SQMAG_API sqmag_status sqmag_device_load(const char* path, sqmag_device** out);
SQMAG_API sqmag_status sqmag_device_parse(const char* json_text, sqmag_device** out);
SQMAG_API sqmag_status sqmag_device_save(const sqmag_device* dev, const char* path);
SQMAG_API sqmag_status sqmag_device_format(const sqmag_device* dev, char** out);
SQMAG_API void sqmag_device_free(sqmag_device* dev);
SQMAG_API sqmag_status sqmag_device_get(const sqmag_device* dev, sqmag_param p, double* value);
SQMAG_API sqmag_status sqmag_device_set(sqmag_device* dev, sqmag_param p, double value);
SQMAG_API sqmag_status sqmag_device_areas(const sqmag_device* dev, double* a1, double* a2);

typedef struct sqmag_modes {
  double f_minus, f_plus;
  int plus_visible;
} sqmag_modes;

SQMAG_API sqmag_status sqmag_device_modes(const sqmag_device* dev, double ib, sqmag_modes* out);
SQMAG_API sqmag_status sqmag_device_modes_at_flux(const sqmag_device* dev, double phi1, sqmag_modes* out);
/* df_minus / dphi1 in Hz per flux quantum. */
SQMAG_API sqmag_status sqmag_responsivity(const sqmag_device* dev, double phi1, double* out);

typedef struct sqmag_derived {
  double fpl1, fpl2;  /* Hz */
  double ec1, ec2;    /* E_c / h, Hz */
  double ej1, ej2;    /* E_J / h, Hz */
  double b;           /* T/A */
  double b0;          /* T */
  double bc;          /* T */
} sqmag_derived;

SQMAG_API sqmag_status sqmag_device_derived(const sqmag_device* dev, sqmag_derived* out);

/* ---- spectroscopy sweeps -------------------------------------------- */

typedef struct sqmag_point {
  double ib;    /* A */
  double freq;  /* Hz */
  int branch;   /* 0 minus, 1 plus */
  double weight;
} sqmag_point;

/* Both branches on ib_min, ib_min + step, ... <= ib_max. Dark plus rows get
 * weight 0. noise_hz > 0 adds seeded Gaussian noise. */
SQMAG_API sqmag_status sqmag_simulate_sweep(const sqmag_device* dev, double ib_min, double ib_max, double step,
                                            double noise_hz, uint64_t seed, sqmag_sweep** out);
SQMAG_API sqmag_status sqmag_sweep_load(const char* path, sqmag_sweep** out);
SQMAG_API sqmag_status sqmag_sweep_save(const sqmag_sweep* sweep, const char* path);
SQMAG_API sqmag_status sqmag_sweep_format(const sqmag_sweep* sweep, char** out);
SQMAG_API size_t sqmag_sweep_size(const sqmag_sweep* sweep);
SQMAG_API sqmag_status sqmag_sweep_get(const sqmag_sweep* sweep, size_t i, sqmag_point* out);
SQMAG_API void sqmag_sweep_free(sqmag_sweep* sweep);

/* ---- parameter fit -------------------------------------------------- */

typedef struct sqmag_fit_options {
  int max_iterations;  /* 0: library default */
  int continuation;    /* -1 default, 0 off, 1 on */
  int require_both_branches; /* -1 default, 0 off, 1 on */
} sqmag_fit_options;

typedef struct sqmag_fit_summary {
  double residual_rms;  /* Hz */
  int iterations;
  int converged;
  int boundary_optimum;
  size_t points_used;
  double value[SQMAG_PARAM_COUNT];
  double sigma[SQMAG_PARAM_COUNT];
  int free[SQMAG_PARAM_COUNT];
} sqmag_fit_summary;

/* Free parameters come from the device's options.free list when present. */
SQMAG_API sqmag_status sqmag_fit_spectrum(const sqmag_sweep* sweep, const sqmag_device* init,
                                          const sqmag_fit_options* options, sqmag_fit** out);
SQMAG_API sqmag_status sqmag_fit_summary_get(const sqmag_fit* fit, sqmag_fit_summary* out);
/* Fitted parameters with the initial device's areas, resonance and options. */
SQMAG_API sqmag_status sqmag_fit_device(const sqmag_fit* fit, sqmag_device** out);
SQMAG_API sqmag_status sqmag_fit_report(const sqmag_fit* fit, char** out);
SQMAG_API void sqmag_fit_free(sqmag_fit* fit);

/* ---- absolute flux -------------------------------------------------- */

typedef struct sqmag_invert_options {
  double tol_hz;          /* <= 0: 1 MHz */
  double window_lo;       /* phi1 window; NaN for the default */
  double window_hi;
  double slope_rel_tol;   /* NaN: sign of the slope hint only */
} sqmag_invert_options;

typedef struct sqmag_candidate {
  double phi1, phi2;
  double field;     /* T */
  double residual;  /* Hz */
  int unique;
  int mirror_ambiguous;
} sqmag_candidate;

/* f_plus and minus_slope may be NaN when not observed. */
SQMAG_API sqmag_status sqmag_invert_flux(const sqmag_device* dev, double f_minus, double f_plus, double minus_slope,
                                         const sqmag_invert_options* options, sqmag_candidates** out);
SQMAG_API size_t sqmag_candidates_size(const sqmag_candidates* c);
SQMAG_API sqmag_status sqmag_candidates_get(const sqmag_candidates* c, size_t i, sqmag_candidate* out);
SQMAG_API void sqmag_candidates_free(sqmag_candidates* c);

/* ---- modulation period ---------------------------------------------- */

typedef struct sqmag_period {
  int64_t numerator, denominator;
  int64_t period_phi0;
  double period_field; /* T, NaN without an area */
} sqmag_period;

/* tol <= 0 and max_denominator <= 0 pick the defaults; area1 <= 0 or NaN skips the field period. */
SQMAG_API sqmag_status sqmag_modulation_period(double r, double tol, int64_t max_denominator, double area1,
                                               sqmag_period* out);

/* ---- power calibration ---------------------------------------------- */

typedef struct sqmag_calibration {
  double attenuation_db;
  double residual_rms_db;
  double free_slope;
  double slope_deviation;
  int slope_ok;
} sqmag_calibration;

/* Rabi frequencies in rad/s. Needs the device's resonance section. */
SQMAG_API sqmag_status sqmag_calibrate_power(const sqmag_device* dev, const double* p_in_dbm, const double* rabi,
                                             size_t n, int enforce_slope, sqmag_calibration* out);
/* Same from a p_in_dbm,omega_r_MHz file. */
SQMAG_API sqmag_status sqmag_calibrate_power_file(const sqmag_device* dev, const char* path, int enforce_slope,
                                                  sqmag_calibration* out);

/* ---- traces and noise ----------------------------------------------- */

typedef struct sqmag_noise_model {
  double a, alpha, b, gamma, s0; /* S(f) = a/f^alpha + b gamma^2/((2 pi f)^2 + gamma^2) + s0, gamma in rad/s */
} sqmag_noise_model;

typedef struct sqmag_trace_info {
  size_t samples;
  double dt;
  int has_s11;
  double f_drive;
  double p_in_dbm;
} sqmag_trace_info;

/* Synthesizes a field-noise trace (model in T^2/Hz) at the bias phi1, mapped to
 * frequency through the responsivity and loop area. as_s11 != 0 also maps it
 * through the device's reflection model at drive power p_in_dbm. */
SQMAG_API sqmag_status sqmag_synthesize_trace(const sqmag_device* dev, double phi1, const sqmag_noise_model* model,
                                              double duration, double dt, uint64_t seed, int as_s11,
                                              double p_in_dbm, sqmag_trace** out);
SQMAG_API sqmag_status sqmag_trace_load(const char* path, sqmag_trace** out);
SQMAG_API sqmag_status sqmag_trace_save(const sqmag_trace* trace, const char* path);
SQMAG_API sqmag_status sqmag_trace_format(const sqmag_trace* trace, char** out);
SQMAG_API sqmag_status sqmag_trace_info_get(const sqmag_trace* trace, sqmag_trace_info* out);
SQMAG_API void sqmag_trace_free(sqmag_trace* trace);

typedef struct sqmag_spectrum_info {
  size_t bins;
  double bandwidth;
  size_t averages;
  double area;          /* m^2 used for the field column */
  double responsivity;  /* Hz per flux quantum; NaN when loaded from file */
  size_t off_curve;     /* flagged samples */
} sqmag_spectrum_info;

/* S11 -> frequency (when needed) -> flux and field ASD at the bias phi1. */
SQMAG_API sqmag_status sqmag_nef_spectrum(const sqmag_device* dev, const sqmag_trace* trace, double phi1,
                                          sqmag_spectrum** out);
SQMAG_API sqmag_status sqmag_spectrum_average(const sqmag_spectrum* const* spectra, size_t n, sqmag_spectrum** out);
SQMAG_API sqmag_status sqmag_spectrum_load(const char* path, double area, sqmag_spectrum** out);
SQMAG_API sqmag_status sqmag_spectrum_save(const sqmag_spectrum* sp, const char* path);
SQMAG_API sqmag_status sqmag_spectrum_format(const sqmag_spectrum* sp, char** out);
SQMAG_API sqmag_status sqmag_spectrum_info_get(const sqmag_spectrum* sp, sqmag_spectrum_info* out);
SQMAG_API sqmag_status sqmag_spectrum_get(const sqmag_spectrum* sp, size_t i, double* f, double* sphi, double* sb);
SQMAG_API void sqmag_spectrum_free(sqmag_spectrum* sp);

typedef struct sqmag_noise_result {
  sqmag_noise_model model; /* field units, T^2/Hz */
  double residual_rms;
  int converged;
  int iterations;
  int flicker_degenerate, telegraph_degenerate, white_degenerate;
  double crossover_flicker_white, crossover_telegraph_white, crossover_flicker_telegraph; /* Hz */
} sqmag_noise_result;

/* Fit on the field column. */
SQMAG_API sqmag_status sqmag_noise_fit(const sqmag_spectrum* sp, sqmag_noise_result* out);
SQMAG_API sqmag_status sqmag_noise_report(const sqmag_spectrum* sp, const sqmag_noise_result* fit, char** out);

#ifdef __cplusplus
}
#endif

#endif
