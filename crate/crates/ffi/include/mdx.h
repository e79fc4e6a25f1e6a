#ifndef MDX_H
#define MDX_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MdxStatus {
  MDX_STATUS_OK = 0,
  MDX_STATUS_NULL_POINTER = 1,
  MDX_STATUS_DOMAIN = 2,
  MDX_STATUS_INVALID_PARAMS = 3,
  MDX_STATUS_NON_CONVERGENCE = 4,
  MDX_STATUS_DIVERGENCE = 5,
  MDX_STATUS_NO_BRACKET = 6,
  MDX_STATUS_INSUFFICIENT_DATA = 7,
  MDX_STATUS_INFEASIBLE = 8,
  MDX_STATUS_OVERFLOW_GUARD = 9,
  MDX_STATUS_UNKNOWN_CANDIDATE = 10,
  MDX_STATUS_ROUTE_MISMATCH = 11,
  MDX_STATUS_INVALID_UTF8 = 12,
  MDX_STATUS_PANIC = 13,
} MdxStatus;

/**
 * Model parameters together with a fluctuation density. Opaque to C.
 */
typedef struct MdxModel MdxModel;

/**
 * Averages that do not exist are NaN and `convergent` is 0.
 */
typedef struct MdxAverage {
  double p;
  double numeric_beta;
  double numeric_xi;
  double analytic_gamma;
  double sqrt_dispersion;
  bool convergent;
} MdxAverage;

typedef struct MdxMultipliers {
  double nu;
  double gamma;
  double c3;
  double shape_k;
} MdxMultipliers;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a model with mass `m` and velocity scale `lambda` and the
 * reference density. Returns null on invalid parameters.
 */
struct MdxModel *mdx_model_new(double m, double lambda);

/**
 * # Safety
 * `model` must be null or a pointer from [`mdx_model_new`] not yet freed.
 */
void mdx_model_free(struct MdxModel *model);

/**
 * Replaces the density. `c3 <= 0` selects the normalizing constant.
 *
 * # Safety
 * `model` must be a live pointer from [`mdx_model_new`].
 */
enum MdxStatus mdx_model_set_distribution(struct MdxModel *model,
                                          double nu,
                                          double gamma,
                                          double c3);

/**
 * # Safety
 * `model` must be a live pointer from [`mdx_model_new`]; `out` must be
 * writable.
 */
enum MdxStatus mdx_model_c(const struct MdxModel *model, double *out);

/**
 * # Safety
 * `model` must be a live pointer from [`mdx_model_new`]; `out` must be
 * writable.
 */
enum MdxStatus mdx_average(const struct MdxModel *model, double p, struct MdxAverage *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum MdxStatus mdx_solve_multipliers(double c1, double c2, struct MdxMultipliers *out);

/**
 * `g_ββ` and `g_ββ β²` at cutoff `cutoff`.
 *
 * # Safety
 * `model` must be a live pointer from [`mdx_model_new`]; both outputs must
 * be writable.
 */
enum MdxStatus mdx_fisher_metric(const struct MdxModel *model,
                                 double beta,
                                 double cutoff,
                                 double *out_g,
                                 double *out_g_beta2);

/**
 * Extrapolated `lim g β²` from the `n` cutoffs in `q_grid`.
 *
 * # Safety
 * `model` must be a live pointer from [`mdx_model_new`]; `q_grid` must
 * point to `n` readable doubles; `out` must be writable.
 */
enum MdxStatus mdx_fisher_limit(const struct MdxModel *model,
                                double beta,
                                const double *q_grid,
                                size_t n,
                                double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum MdxStatus mdx_geodesic(double beta0, double mu, double *out);

/**
 * # Safety
 * `out` must be writable.
 */
enum MdxStatus mdx_geodesic_distance(double beta1, double beta2, double *out);

/**
 * Numerical `sup_p (vp − H(p))` with `c² = 2λ²`; the maximizing momentum
 * goes to `out_p` when it is non-null.
 *
 * # Safety
 * `model` must be a live pointer from [`mdx_model_new`]; `out_value` must
 * be writable; `out_p` may be null.
 */
enum MdxStatus mdx_legendre(const struct MdxModel *model,
                            double v,
                            double tol,
                            double *out_value,
                            double *out_p);

/**
 * Runs the verification suite and returns the JSON report through
 * `out_json`; free it with [`mdx_string_free`]. `config_json` may be null
 * for the defaults. `out_failed` receives the number of failed checks.
 *
 * # Safety
 * `config_json` must be null or a NUL-terminated string; the outputs must
 * be writable.
 */
enum MdxStatus mdx_verify_json(const char *config_json,
                               uint64_t seed,
                               char **out_json,
                               size_t *out_failed);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void mdx_string_free(char *s);

/**
 * Message for the last failure on this thread, or null. Valid until the
 * next failing call on the same thread.
 */
const char *mdx_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *mdx_status_name(enum MdxStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MDX_H */
