#ifndef LATCLOCK_H
#define LATCLOCK_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LcStatus {
  LC_STATUS_OK = 0,
  LC_STATUS_NULL_POINTER = 1,
  LC_STATUS_INVALID_INPUT = 2,
  LC_STATUS_CONFIG = 3,
  LC_STATUS_UNKNOWN_SCENARIO = 4,
  LC_STATUS_IO = 5,
  LC_STATUS_DIVERGENCE = 6,
  LC_STATUS_DEGENERATE = 7,
  LC_STATUS_UTF8 = 8,
  LC_STATUS_OUT_OF_RANGE = 9,
  LC_STATUS_PANIC = 10,
} LcStatus;

/**
 * An Allan deviation curve.
 */
typedef struct LcCurve LcCurve;

/**
 * A resolved scenario.
 */
typedef struct LcScenario LcScenario;

/**
 * A fractional-frequency time series.
 */
typedef struct LcTrace LcTrace;

typedef struct LcPrepResult {
  double atom_number;
  /**
   * K
   */
  double temperature;
  double transfer_fraction;
  /**
   * K
   */
  double lattice_depth;
} LcPrepResult;

/**
 * Noise coefficients on `S_y(f) = h0 + h-1/f + h-2/f²` plus linear drift.
 */
typedef struct LcNoiseSpec {
  double white_fm_h0;
  double flicker_fm_hm1;
  double random_walk_hm2;
  double linear_drift;
  double flicker_floor_sigma;
} LcNoiseSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` (NUL
 * terminated, truncated to `len`). Returns the full message length in
 * bytes excluding the terminator, or 0 when there is no error.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t lc_last_error(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *lc_version(void);

/**
 * Loads scenario `name` from the TOML file at `path`, or from the built-in
 * scenarios when `path` is null.
 *
 * # Safety
 * `name` and a non-null `path` must be NUL-terminated strings; `out` must
 * be writable.
 */
enum LcStatus lc_scenario_load(const char *name,
                               const char *path,
                               struct LcScenario **out_scenario);

/**
 * # Safety
 * `scenario` must be null or a handle from [`lc_scenario_load`] not yet freed.
 */
void lc_scenario_free(struct LcScenario *scenario);

/**
 * # Safety
 * `scenario` must be a live handle; `out_seed` must be writable.
 */
enum LcStatus lc_scenario_seed(const struct LcScenario *scenario, uint64_t *out_seed);

/**
 * Clock transition frequency of the scenario's species, Hz.
 *
 * # Safety
 * `scenario` must be a live handle; `out_hz` must be writable.
 */
enum LcStatus lc_scenario_clock_frequency(const struct LcScenario *scenario, double *out_hz);

/**
 * Runs the scenario's preparation chain.
 *
 * # Safety
 * `scenario` must be a live handle; `out_result` must be writable.
 */
enum LcStatus lc_prep_run(const struct LcScenario *scenario, struct LcPrepResult *out_result);

/**
 * Synthesizes `n` samples spaced `dt` seconds.
 *
 * # Safety
 * `spec` must point to a valid [`LcNoiseSpec`]; `out_trace` must be writable.
 */
enum LcStatus lc_noise_synthesize(const struct LcNoiseSpec *spec,
                                  size_t n,
                                  double dt,
                                  uint64_t seed,
                                  uint64_t stream_id,
                                  struct LcTrace **out_trace);

/**
 * Wraps caller-owned samples in a new trace (the data are copied).
 *
 * # Safety
 * `samples` must point to `len` readable doubles; `out_trace` must be writable.
 */
enum LcStatus lc_trace_from_samples(const double *samples,
                                    size_t len,
                                    double dt,
                                    struct LcTrace **out_trace);

/**
 * Number of samples, or 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
size_t lc_trace_len(const struct LcTrace *trace);

/**
 * Sample interval in seconds, or 0 for a null handle.
 *
 * # Safety
 * `trace` must be null or a live handle.
 */
double lc_trace_dt(const struct LcTrace *trace);

/**
 * Copies all samples into `buf`, which must hold at least
 * [`lc_trace_len`] doubles.
 *
 * # Safety
 * `trace` must be a live handle; `buf` must point to `len` writable doubles.
 */
enum LcStatus lc_trace_copy(const struct LcTrace *trace, double *buf, size_t len);

/**
 * # Safety
 * `trace` must be null or a handle not yet freed.
 */
void lc_trace_free(struct LcTrace *trace);

/**
 * Overlapping Allan deviation at `taus` (seconds, ascending multiples of
 * the sample interval). A null `taus` selects the octave grid.
 *
 * # Safety
 * `trace` must be a live handle; `taus` must be null or point to `n_taus`
 * doubles; `out_curve` must be writable.
 */
enum LcStatus lc_allan_overlapping(const struct LcTrace *trace,
                                   const double *taus,
                                   size_t n_taus,
                                   struct LcCurve **out_curve);

/**
 * Number of points, or 0 for a null handle.
 *
 * # Safety
 * `curve` must be null or a live handle.
 */
size_t lc_curve_len(const struct LcCurve *curve);

/**
 * Reads point `index`.
 *
 * # Safety
 * `curve` must be a live handle; the output pointers must be writable.
 */
enum LcStatus lc_curve_get(const struct LcCurve *curve,
                           size_t index,
                           double *out_tau,
                           double *out_sigma);

/**
 * # Safety
 * `curve` must be null or a handle not yet freed.
 */
void lc_curve_free(struct LcCurve *curve);

/**
 * Rabi excitation probability; angular detuning and Rabi frequency.
 */
double lc_rabi_probability(double detuning, double rabi, double pulse_time);

/**
 * FWHM (Hz) of a π-pulse Rabi line of length `pulse_time`.
 *
 * # Safety
 * `out_hz` must be writable.
 */
enum LcStatus lc_fourier_limited_fwhm(double pulse_time, double *out_hz);

/**
 * Lattice depth in kelvin for the default depth calibration. `species` is
 * an isotope label such as `"Sr88"`; the wavelength must lie near its magic
 * wavelength.
 *
 * # Safety
 * `species` must be a NUL-terminated string; `out_kelvin` must be writable.
 */
enum LcStatus lc_trap_depth(const char *species,
                            double input_power,
                            double waist,
                            double wavelength,
                            double enhancement_factor,
                            double *out_kelvin);

/**
 * Projection-noise instability at averaging time `tau`.
 *
 * # Safety
 * `out_sigma` must be writable.
 */
enum LcStatus lc_qpn_limit(double fwhm,
                           double nu0,
                           double atoms,
                           double cycle_time,
                           double tau,
                           double *out_sigma);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LATCLOCK_H */
