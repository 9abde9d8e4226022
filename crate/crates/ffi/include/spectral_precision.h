#ifndef SPECTRAL_PRECISION_H
#define SPECTRAL_PRECISION_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum SpStatus {
  SP_STATUS_OK = 0,
  SP_STATUS_NULL_POINTER = 1,
  SP_STATUS_INVALID_INPUT = 2,
  SP_STATUS_SINGULAR = 3,
  SP_STATUS_NOT_CONVERGED = 4,
  SP_STATUS_UNDEFINED = 5,
  SP_STATUS_IO = 6,
  SP_STATUS_PANIC = 7,
} SpStatus;

/**
 * Data-generating processes available to [`sp_panel_simulate`].
 */
typedef enum SpDgp {
  SP_DGP_WHITE_NOISE = 0,
  SP_DGP_WHITE_NOISE_COV = 1,
  SP_DGP_VAR1 = 2,
  SP_DGP_VARMA22 = 3,
  SP_DGP_VAR1_BLOCK = 4,
} SpDgp;

/**
 * Estimator variant for [`sp_cglasso_path`].
 */
typedef enum SpVariant {
  SP_VARIANT_PLAIN = 0,
  SP_VARIANT_COHERENCE = 1,
  SP_VARIANT_SCALED_INNER = 2,
} SpVariant;

/**
 * An `n × p` real panel of time series.
 */
typedef struct SpPanel SpPanel;

/**
 * Precision estimates along a penalty path with their EBIC values.
 */
typedef struct SpPrecisionPath SpPrecisionPath;

/**
 * Averaged periodogram at one Fourier frequency.
 */
typedef struct SpSpectralEstimate SpSpectralEstimate;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null if it succeeded.
 * The pointer stays valid until the next call into this library on the
 * same thread.
 */
const char *sp_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *sp_version(void);

/**
 * Creates a panel from `n * p` row-major values (row `t` is time `t`).
 *
 * # Safety
 * `values` must point to `n * p` readable doubles; `out` must be writable.
 */
enum SpStatus sp_panel_new(const double *values, size_t n, size_t p, struct SpPanel **out);

/**
 * Simulates `n` observations of a `p`-dimensional built-in process.
 *
 * # Safety
 * `out` must be writable.
 */
enum SpStatus sp_panel_simulate(enum SpDgp dgp,
                                size_t p,
                                size_t n,
                                uint64_t seed,
                                struct SpPanel **out);

/**
 * Number of observations, or 0 for a null handle.
 *
 * # Safety
 * `panel` must be null or a live handle.
 */
size_t sp_panel_n(const struct SpPanel *panel);

/**
 * Number of series, or 0 for a null handle.
 *
 * # Safety
 * `panel` must be null or a live handle.
 */
size_t sp_panel_p(const struct SpPanel *panel);

/**
 * Copies the panel row-major into `values`, which holds `len` doubles.
 *
 * # Safety
 * `panel` must be a live handle and `values` must hold `len` doubles.
 */
enum SpStatus sp_panel_values(const struct SpPanel *panel, double *values, size_t len);

/**
 * Releases a panel. Null is ignored.
 *
 * # Safety
 * `panel` must be null or a handle not yet freed.
 */
void sp_panel_free(struct SpPanel *panel);

/**
 * Averaged periodogram at Fourier index `j` (wrapped into the grid of the
 * panel length) with smoothing half-width `m`.
 *
 * # Safety
 * `panel` must be a live handle; `out` must be writable.
 */
enum SpStatus sp_averaged_periodogram(const struct SpPanel *panel,
                                      int64_t j,
                                      size_t m,
                                      struct SpSpectralEstimate **out);

/**
 * Dimension `p` of the estimate, or 0 for a null handle.
 *
 * # Safety
 * `est` must be null or a live handle.
 */
size_t sp_spectral_estimate_dim(const struct SpSpectralEstimate *est);

/**
 * Copies `f̂` row-major into `re` and `im`, each holding `len` doubles.
 *
 * # Safety
 * `est` must be a live handle; `re` and `im` must hold `len` doubles.
 */
enum SpStatus sp_spectral_estimate_matrix(const struct SpSpectralEstimate *est,
                                          double *re,
                                          double *im,
                                          size_t len);

/**
 * Releases a spectral estimate. Null is ignored.
 *
 * # Safety
 * `est` must be null or a handle not yet freed.
 */
void sp_spectral_estimate_free(struct SpSpectralEstimate *est);

/**
 * Fits the graphical lasso path on `count` penalties spaced log-evenly over
 * `decades` decades below the variant's smallest all-zero penalty, and
 * marks the EBIC minimizer (`gamma` in `[0, 1]`, `n_raw` the series length).
 *
 * # Safety
 * `est` must be a live handle; `out` must be writable.
 */
enum SpStatus sp_cglasso_path(const struct SpSpectralEstimate *est,
                              enum SpVariant variant,
                              size_t count,
                              double decades,
                              double gamma,
                              size_t n_raw,
                              struct SpPrecisionPath **out);

/**
 * Number of fitted penalties, or 0 for a null handle.
 *
 * # Safety
 * `path` must be null or a live handle.
 */
size_t sp_precision_path_len(const struct SpPrecisionPath *path);

/**
 * Dimension `p` of the estimates, or 0 for a null handle.
 *
 * # Safety
 * `path` must be null or a live handle.
 */
size_t sp_precision_path_dim(const struct SpPrecisionPath *path);

/**
 * Index of the EBIC-selected estimate.
 *
 * # Safety
 * `path` must be a live handle; `index` must be writable.
 */
enum SpStatus sp_precision_path_selected(const struct SpPrecisionPath *path, size_t *index);

/**
 * Penalty, EBIC, optimality residual and convergence flag of estimate `i`.
 * Any output pointer may be null to skip it.
 *
 * # Safety
 * `path` must be a live handle; non-null outputs must be writable.
 */
enum SpStatus sp_precision_path_info(const struct SpPrecisionPath *path,
                                     size_t i,
                                     double *lambda,
                                     double *ebic,
                                     double *kkt_residual,
                                     bool *converged);

/**
 * Copies `Θ̂` of estimate `i` row-major into `re` and `im` (`len` doubles
 * each).
 *
 * # Safety
 * `path` must be a live handle; `re` and `im` must hold `len` doubles.
 */
enum SpStatus sp_precision_path_theta(const struct SpPrecisionPath *path,
                                      size_t i,
                                      double *re,
                                      double *im,
                                      size_t len);

/**
 * Releases a precision path. Null is ignored.
 *
 * # Safety
 * `path` must be null or a handle not yet freed.
 */
void sp_precision_path_free(struct SpPrecisionPath *path);

/**
 * Complex lasso `(1/2n)‖y − Xβ‖² + λ‖β‖₁` for an `n × p` design given
 * row-major as real and imaginary parts. Columns are rescaled to norm `√n`
 * internally and the coefficients returned on the original scale. Writes
 * `p` entries to `beta_re` and `beta_im`; `converged` may be null.
 *
 * # Safety
 * Inputs must hold `n * p` (design) and `n` (response) doubles; outputs `p`.
 */
enum SpStatus sp_classo(const double *x_re,
                        const double *x_im,
                        const double *y_re,
                        const double *y_im,
                        size_t n,
                        size_t p,
                        double lambda,
                        double *beta_re,
                        double *beta_im,
                        bool *converged);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SPECTRAL_PRECISION_H */
