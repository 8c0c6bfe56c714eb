#ifndef QWFLOW_H
#define QWFLOW_H

/* Generated by cbindgen from qwflow-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Observable column of a time series.
 */
typedef enum QwfColumn {
  /**
   * Relative probability at the marked vertex.
   */
  QWF_COLUMN_NU_MARKED = 0,
  /**
   * Relative probability at one unmarked vertex.
   */
  QWF_COLUMN_NU_UNMARKED = 1,
  /**
   * Internal-graph norm of the state.
   */
  QWF_COLUMN_NORM_KN = 2,
} QwfColumn;

/**
 * Status code returned by every fallible entry point.
 */
typedef enum QwfStatus {
  /**
   * Success; out-parameters are valid.
   */
  QWF_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QWF_STATUS_NULL_POINTER = 1,
  /**
   * An argument was out of range (bad size, bad index, bad theta, ...).
   */
  QWF_STATUS_INVALID_ARGUMENT = 2,
  /**
   * The computation failed numerically (degenerate spectrum, ...).
   */
  QWF_STATUS_NUMERIC_FAILURE = 3,
  /**
   * Filesystem failure.
   */
  QWF_STATUS_IO_FAILURE = 4,
  /**
   * A panic was caught at the boundary; state may be incomplete.
   */
  QWF_STATUS_PANIC = 5,
} QwfStatus;

/**
 * Opaque time-series handle; create with `qwf_series_reduced` or
 * `qwf_series_simulate`, release with `qwf_series_free`.
 */
typedef struct QwfSeries QwfSeries;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Version of the underlying toolkit as a static NUL-terminated string.
 */
const char *qwf_version(void);

/**
 * Runs the reduced recursion for `t = 0..=t_max` on a graph with `n`
 * vertices and stores a new series handle in `*out`.
 */
enum QwfStatus qwf_series_reduced(uint64_t n, uint64_t t_max, struct QwfSeries **out);

/**
 * Runs the full arc-space simulation (truncated tails when `source_sink`
 * is false) and stores a new series handle in `*out`.
 */
enum QwfStatus qwf_series_simulate(uint64_t n,
                                   uint64_t marked,
                                   uint64_t t_max,
                                   bool source_sink,
                                   struct QwfSeries **out);

/**
 * Number of records in a series; 0 for a null handle.
 */
uint64_t qwf_series_len(const struct QwfSeries *series);

/**
 * Reads one observable at step `t` into `*out`.
 */
enum QwfStatus qwf_series_value(const struct QwfSeries *series,
                                uint64_t t,
                                enum QwfColumn column,
                                double *out);

/**
 * Releases a series handle; a null handle is a no-op.
 */
void qwf_series_free(struct QwfSeries *series);

/**
 * Stationary relative probability at the marked vertex.
 */
enum QwfStatus qwf_stationary_nu(uint64_t n, double *out);

/**
 * Mixing time to accuracy `e^(-theta)`; writes the last violating step to
 * `*t_theta_out` and the horizon certificate to `*converged_out`.
 */
enum QwfStatus qwf_mixing_time(uint64_t n,
                               double theta,
                               double horizon_factor,
                               uint64_t *t_theta_out,
                               bool *converged_out);

/**
 * Eigenvalues of the reduced update matrix, ordered as the real branch
 * near −1 followed by the conjugate pair (positive imaginary part first).
 * `re_out` and `im_out` must point to arrays of 3 doubles.
 */
enum QwfStatus qwf_eigenvalues(uint64_t n, double *re_out, double *im_out);

/**
 * Damped-oscillation profile of the marked-vertex probability; NaN for
 * sizes below the smallest admissible graph.
 */
double qwf_pulsation_formula(double t, uint64_t n);

/**
 * Refit of the profile with the corrected envelope decay; NaN for sizes
 * below the smallest admissible graph.
 */
double qwf_refined_pulsation_formula(double t, uint64_t n);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QWFLOW_H */
