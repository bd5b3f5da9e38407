/*
 * gevreg: binary regression with a generalized-extreme-value response curve,
 *
 *     pi = 1 - exp{ -[(1 - tau * x'beta)_+]^(-1/tau) },
 *
 * maximum likelihood fitting, Wald inference and parametric bootstrap
 * confidence intervals / hypothesis tests.
 *
 * Conventions:
 *   - Every fallible call returns a gevreg_status; GEVREG_OK is zero.
 *   - On failure gevreg_last_error() describes the problem. The message is
 *     thread-local and stays valid until the next gevreg call on the same
 *     thread.
 *   - Handles are opaque and owned by the caller; release them with the
 *     matching *_free function. Strings returned through char** are
 *     released with gevreg_string_free.
 *   - Handles are immutable after creation and may be shared across threads.
 */
#ifndef GEVREG_GEVREG_H
#define GEVREG_GEVREG_H

#include <stddef.h>
#include <stdint.h>

#if defined(GEVREG_BUILDING_LIBRARY)
#define GEVREG_API __attribute__((visibility("default")))
#else
#define GEVREG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum gevreg_status {
  GEVREG_OK = 0,
  GEVREG_ERR_INVALID_ARGUMENT = 1,
  GEVREG_ERR_DOMAIN = 2,
  GEVREG_ERR_DERIVATIVE = 3,
  GEVREG_ERR_VALIDATION = 4,
  GEVREG_ERR_SCHEMA = 5,
  GEVREG_ERR_PARSE = 6,
  GEVREG_ERR_IO = 7,
  GEVREG_ERR_SEPARATION = 8,
  GEVREG_ERR_NONCONVERGENCE = 9,
  GEVREG_ERR_INFERENCE = 10,
  GEVREG_ERR_INSUFFICIENT_REPLICATES = 11,
  GEVREG_ERR_UNRELIABLE_RUN = 12,
  GEVREG_ERR_INTERNAL = 13
} gevreg_status;

typedef enum gevreg_tau_mode { GEVREG_TAU_FIXED = 0, GEVREG_TAU_PROFILED = 1 } gevreg_tau_mode;

typedef enum gevreg_format { GEVREG_FORMAT_TEXT = 0, GEVREG_FORMAT_JSON = 1 } gevreg_format;

typedef struct gevreg_dataset gevreg_dataset;
typedef struct gevreg_fit gevreg_fit;
typedef struct gevreg_bootstrap gevreg_bootstrap;

GEVREG_API const char* gevreg_version(void);
GEVREG_API const char* gevreg_last_error(void);
GEVREG_API const char* gevreg_status_name(gevreg_status status);
GEVREG_API void gevreg_string_free(char* s);

/* ---- response curve ---------------------------------------------------- */

GEVREG_API gevreg_status gevreg_response_prob(double eta, double tau, double* out);
/* Inverse of gevreg_response_prob; requires 0 < pi < 1. */
GEVREG_API gevreg_status gevreg_link(double pi, double tau, double* out);
/* log(1 - pi); -INFINITY on the certain-event side of the boundary. */
GEVREG_API gevreg_status gevreg_log_survival(double eta, double tau, double* out);
GEVREG_API gevreg_status gevreg_d_prob_d_eta(double eta, double tau, double* out);

/* ---- datasets ---------------------------------------------------------- */

GEVREG_API gevreg_status gevreg_dataset_read_csv(const char* path, const char* response,
                                                 const char* const* predictors, size_t n_predictors,
                                                 int intercept, gevreg_dataset** out);

/* x is row-major, n rows by n_predictors columns; y holds 0/1 values. */
GEVREG_API gevreg_status gevreg_dataset_from_arrays(size_t n, size_t n_predictors, const double* y,
                                                    const double* x, const char* const* predictor_names,
                                                    int intercept, const char* response_name,
                                                    gevreg_dataset** out);

/* Simulation spec as JSON, e.g.
 *   {"n": 500, "beta": [1.0, -0.05], "tau": -0.25, "seed": 7, "response": "y",
 *    "covariates": [{"name": "weight", "distribution": "uniform", "a": 20, "b": 80}]}
 * Distributions: uniform(a, b), normal(mean, sd), bernoulli(q), constant(value). */
GEVREG_API gevreg_status gevreg_dataset_simulate(const char* spec_json, gevreg_dataset** out);

/* n = 515, weight ~ Uniform(10, 90), beta = (0.9947, -0.0456), tau = -0.25. */
GEVREG_API gevreg_status gevreg_dataset_dengue_analog(uint64_t seed, gevreg_dataset** out);

GEVREG_API size_t gevreg_dataset_rows(const gevreg_dataset* data);
GEVREG_API size_t gevreg_dataset_cols(const gevreg_dataset* data);
GEVREG_API double gevreg_dataset_prevalence(const gevreg_dataset* data);
GEVREG_API gevreg_status gevreg_dataset_to_csv(const gevreg_dataset* data, char** out);
GEVREG_API void gevreg_dataset_free(gevreg_dataset* data);

/* ---- fitting ----------------------------------------------------------- */

typedef struct gevreg_fit_options {
  gevreg_tau_mode tau_mode;
  double tau;      /* fixed value, or profile starting point */
  int max_iter;
  double grad_tol;
  double step_tol;
  double tau_max;
} gevreg_fit_options;

GEVREG_API void gevreg_fit_options_init(gevreg_fit_options* options);

/* On GEVREG_ERR_NONCONVERGENCE *out still receives the (unconverged) fit. */
GEVREG_API gevreg_status gevreg_fit_mle(const gevreg_dataset* data, const gevreg_fit_options* options,
                                        gevreg_fit** out);

GEVREG_API size_t gevreg_fit_num_params(const gevreg_fit* fit);
GEVREG_API gevreg_status gevreg_fit_coefficients(const gevreg_fit* fit, double* out, size_t len);
GEVREG_API gevreg_status gevreg_fit_std_errors(const gevreg_fit* fit, double* out, size_t len);
/* Row-major p x p. */
GEVREG_API gevreg_status gevreg_fit_vcov(const gevreg_fit* fit, double* out, size_t len);
GEVREG_API double gevreg_fit_tau(const gevreg_fit* fit);
GEVREG_API gevreg_tau_mode gevreg_fit_tau_mode(const gevreg_fit* fit);
GEVREG_API double gevreg_fit_loglik(const gevreg_fit* fit);
GEVREG_API int gevreg_fit_converged(const gevreg_fit* fit);
GEVREG_API int gevreg_fit_iterations(const gevreg_fit* fit);
GEVREG_API int gevreg_fit_boundary_flag(const gevreg_fit* fit);

/* Wald table (estimate, SE, CI, p-value) rendered as text or JSON. */
GEVREG_API gevreg_status gevreg_fit_report(const gevreg_fit* fit, double alpha, gevreg_format format,
                                           char** out);
GEVREG_API void gevreg_fit_free(gevreg_fit* fit);

/* ---- parametric bootstrap --------------------------------------------- */

typedef struct gevreg_boot_options {
  size_t replicates; /* B */
  double alpha;
  uint64_t seed;
  size_t workers;
} gevreg_boot_options;

GEVREG_API void gevreg_boot_options_init(gevreg_boot_options* options);

/* Results are identical for a given (data, fit, replicates, alpha, seed)
 * whatever the worker count. On GEVREG_ERR_UNRELIABLE_RUN (more than 20% of
 * replicates failed) *out receives the partial result. */
GEVREG_API gevreg_status gevreg_bootstrap_run(const gevreg_dataset* data, const gevreg_fit* fit,
                                              const gevreg_boot_options* options, gevreg_bootstrap** out);

GEVREG_API size_t gevreg_bootstrap_requested(const gevreg_bootstrap* boot);
GEVREG_API size_t gevreg_bootstrap_effective(const gevreg_bootstrap* boot);
GEVREG_API size_t gevreg_bootstrap_failed(const gevreg_bootstrap* boot);
GEVREG_API gevreg_status gevreg_bootstrap_mean(const gevreg_bootstrap* boot, double* out, size_t len);
GEVREG_API gevreg_status gevreg_bootstrap_std_errors(const gevreg_bootstrap* boot, double* out, size_t len);
GEVREG_API gevreg_status gevreg_bootstrap_ci(const gevreg_bootstrap* boot, double* low, double* high, size_t len);
GEVREG_API gevreg_status gevreg_bootstrap_p_values(const gevreg_bootstrap* boot, double* out, size_t len);
GEVREG_API gevreg_status gevreg_bootstrap_report(const gevreg_bootstrap* boot, gevreg_format format, char** out);
GEVREG_API void gevreg_bootstrap_free(gevreg_bootstrap* boot);

#ifdef __cplusplus
}
#endif

#endif /* GEVREG_GEVREG_H */
