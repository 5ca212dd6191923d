#ifndef AHMASS_H
#define AHMASS_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result codes shared by all entry points.
 */
typedef enum AhmStatus {
  AHM_STATUS_OK = 0,
  AHM_STATUS_NULL_POINTER = 1,
  AHM_STATUS_INVALID_ARGUMENT = 2,
  AHM_STATUS_DIMENSION_MISMATCH = 3,
  AHM_STATUS_CHART_DOMAIN = 4,
  AHM_STATUS_DEGENERATE_METRIC = 5,
  AHM_STATUS_BOUNDARY_MISMATCH = 6,
  AHM_STATUS_METRIC_SINGULARITY = 7,
  AHM_STATUS_BASIS_UNKNOWN = 8,
  AHM_STATUS_NO_ANALYTIC_DERIVATIVES = 9,
  AHM_STATUS_DIVERGENT = 10,
  AHM_STATUS_BOUNDARY_CONDITIONS = 11,
  AHM_STATUS_NOT_LORENTZ = 12,
  AHM_STATUS_INVALID_UTF8 = 13,
  AHM_STATUS_BUFFER_TOO_SMALL = 14,
  AHM_STATUS_PANIC = 15,
} AhmStatus;

/**
 * Causal class of a mass covector.
 */
typedef enum AhmClassification {
  AHM_CLASSIFICATION_TIMELIKE_FUTURE = 0,
  AHM_CLASSIFICATION_TIMELIKE_PAST = 1,
  AHM_CLASSIFICATION_NULL_FUTURE = 2,
  AHM_CLASSIFICATION_NULL_PAST = 3,
  AHM_CLASSIFICATION_SPACELIKE = 4,
  AHM_CLASSIFICATION_ZERO = 5,
} AhmClassification;

/**
 * Extrapolation outcome, worst over the covector components.
 */
typedef enum AhmLimitStatus {
  AHM_LIMIT_STATUS_CONVERGED = 0,
  AHM_LIMIT_STATUS_UNCONVERGED = 1,
  AHM_LIMIT_STATUS_DIVERGENT = 2,
} AhmLimitStatus;

/**
 * Mass covector, invariant mass and diagnostics.
 */
typedef struct AhmMassResult AhmMassResult;

/**
 * A metric together with the background its mass is measured against.
 */
typedef struct AhmMetric AhmMetric;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or NULL. Valid until
 * the next failing call on the same thread.
 */
const char *ahm_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ahm_version(void);

/**
 * Hyperbolic space `H^n` over the round sphere.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum AhmStatus ahm_metric_hyperbolic(size_t n, struct AhmMetric **out);

/**
 * Two-dimensional Kottler metric `dr²/(r² − η) + r² dφ²`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum AhmStatus ahm_metric_kottler2d(double eta, struct AhmMetric **out);

/**
 * `dr²/(r² + k − 2m r^{2−n}) + r² h̆` over the default boundary for `(k, n)`.
 *
 * # Safety
 * `out` must be valid for a pointer write.
 */
enum AhmStatus ahm_metric_schwarzschild_ads(size_t n,
                                            int32_t k,
                                            double m_param,
                                            struct AhmMetric **out);

/**
 * New handle for `metric` pulled back by `r ↦ r + γ r^{1−n/2}`.
 *
 * # Safety
 * `metric` must be a live handle; `out` must be valid for a pointer write.
 */
enum AhmStatus ahm_metric_apply_gauge(const struct AhmMetric *metric,
                                      double gamma,
                                      struct AhmMetric **out);

/**
 * # Safety
 * `metric` must be NULL or a handle not yet freed.
 */
void ahm_metric_free(struct AhmMetric *metric);

/**
 * Number of basis potentials `V₍μ₎` (the covector length).
 *
 * # Safety
 * `metric` must be a live handle; `out` must be valid for a write.
 */
enum AhmStatus ahm_metric_basis_len(const struct AhmMetric *metric, size_t *out);

/**
 * Flux of `V₍μ₎` through `{r = radius}` with its quadrature error estimate.
 *
 * # Safety
 * `metric` must be a live handle; `value` and `quad_err` valid for writes.
 */
enum AhmStatus ahm_flux(const struct AhmMetric *metric,
                        size_t mu,
                        double radius,
                        double *value,
                        double *quad_err);

/**
 * Mass covector and invariant mass; `radii` may be NULL with
 * `n_radii = 0` for the default schedule.
 *
 * # Safety
 * `metric` must be a live handle, `radii` valid for `n_radii` reads,
 * `out` valid for a pointer write.
 */
enum AhmStatus ahm_mass(const struct AhmMetric *metric,
                        const double *radii,
                        size_t n_radii,
                        struct AhmMassResult **out);

/**
 * Copies the covector into `buf`; `len` receives its length. Fails with
 * `BufferTooSmall` (after setting `len`) when `cap` is too small.
 *
 * # Safety
 * `result` must be a live handle, `buf` valid for `cap` writes, `len` for
 * one write.
 */
enum AhmStatus ahm_mass_result_components(const struct AhmMassResult *result,
                                          double *buf,
                                          size_t cap,
                                          size_t *len);

/**
 * `m²`, the signed mass `m` (with `has_m = false` when spacelike), and the
 * causal class.
 *
 * # Safety
 * `result` must be a live handle; the out pointers must be valid for writes.
 */
enum AhmStatus ahm_mass_result_invariants(const struct AhmMassResult *result,
                                          double *m2,
                                          double *m,
                                          bool *has_m,
                                          enum AhmClassification *class_);

/**
 * Worst extrapolation status over the covector components.
 *
 * # Safety
 * `result` must be a live handle; `out` valid for a write.
 */
enum AhmStatus ahm_mass_result_status(const struct AhmMassResult *result, enum AhmLimitStatus *out);

/**
 * # Safety
 * `result` must be NULL or a handle not yet freed.
 */
void ahm_mass_result_free(struct AhmMassResult *result);

/**
 * Computed `H(V₍₀₎)` of the γ-deformed `H^n` and its closed-form value.
 *
 * # Safety
 * `computed` and `predicted` must be valid for writes.
 */
enum AhmStatus ahm_gauge_demo(size_t n, double gamma, double *computed, double *predicted);

/**
 * `x = 2/(r + √(r² + k))`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum AhmStatus ahm_compactify(double r, int32_t k, double *out);

/**
 * `r = (1 − kx²/4)/x`.
 *
 * # Safety
 * `out` must be valid for a write.
 */
enum AhmStatus ahm_decompactify(double x, int32_t k, double *out);

/**
 * Runs a CLI command (`mass`, `gauge-demo`, `check`, `flux-sweep`) on a JSON
 * config. `report` receives the JSON report (free with
 * [`ahm_string_free`]) and `exit_code` the code the binary would return.
 *
 * # Safety
 * `command` and `config_json` must be NUL-terminated strings; `report` and
 * `exit_code` must be valid for writes.
 */
enum AhmStatus ahm_run_json(const char *command,
                            const char *config_json,
                            char **report,
                            int32_t *exit_code);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void ahm_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AHMASS_H */
