/* C interface to the MAR(1) toolkit.
 *
 * All functions return markit_status; results come back through out
 * parameters. Objects are opaque handles that must be released with the
 * matching *_free function. On failure the thread-local message from
 * markit_last_error() describes the problem. Matrix buffers are dense
 * column-major doubles owned by the caller unless stated otherwise.
 */
#ifndef MARKIT_H
#define MARKIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define MARKIT_API __declspec(dllexport)
#else
#define MARKIT_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum markit_status {
  MARKIT_OK = 0,
  MARKIT_ERR_DIMENSION = 1,
  MARKIT_ERR_PRECONDITION = 2,
  MARKIT_ERR_PARSE = 3,
  MARKIT_ERR_NUMERIC = 4,
  MARKIT_ERR_IO = 5,
  MARKIT_ERR_INVALID_ARG = 6,
  MARKIT_ERR_INTERNAL = 7
} markit_status;

typedef enum markit_method {
  MARKIT_METHOD_PROJ = 0,
  MARKIT_METHOD_LSE = 1,
  MARKIT_METHOD_MLE = 2
} markit_method;

typedef enum markit_fc_method {
  MARKIT_FC_PROJ = 0,
  MARKIT_FC_LSE = 1,
  MARKIT_FC_MLE = 2,
  MARKIT_FC_VAR1 = 3,
  MARKIT_FC_IAR1 = 4,
  MARKIT_FC_IAR2 = 5
} markit_fc_method;

typedef enum markit_cov_kind {
  MARKIT_COV_IDENTITY = 0,
  MARKIT_COV_DIAGONAL = 1,
  MARKIT_COV_FULL = 2,
  MARKIT_COV_KRONECKER = 3
} markit_cov_kind;

typedef struct markit_series markit_series;
typedef struct markit_model markit_model;
typedef struct markit_var1 markit_var1;
typedef struct markit_fit markit_fit;
typedef struct markit_acov markit_acov;
typedef struct markit_ci markit_ci;
typedef struct markit_irf markit_irf;
typedef struct markit_forecast markit_forecast;
typedef struct markit_table markit_table;

MARKIT_API const char* markit_version(void);
/* Message for the most recent failure on this thread; never NULL. */
MARKIT_API const char* markit_last_error(void);

/* ---- series ---- */
MARKIT_API markit_status markit_series_load_csv(const char* path, markit_series** out);
MARKIT_API markit_status markit_series_save_csv(const markit_series* s, const char* path);
MARKIT_API markit_status markit_series_new(int m, int n, int T, const double* values,
                                           markit_series** out);
MARKIT_API markit_status markit_series_dims(const markit_series* s, int* m, int* n, int* T);
/* Label strings are owned by the series handle. */
MARKIT_API markit_status markit_series_row_label(const markit_series* s, int i,
                                                 const char** out);
MARKIT_API markit_status markit_series_col_label(const markit_series* s, int j,
                                                 const char** out);
/* buf receives the m*n entries of observation t (0-based), column-major. */
MARKIT_API markit_status markit_series_get(const markit_series* s, int t, double* buf);
MARKIT_API markit_status markit_series_preprocess(const markit_series* s, const char* steps,
                                                  markit_series** out);
MARKIT_API markit_status markit_series_rss(const markit_series* s, double* out);
/* buf receives (max_lag+1) * m * n values: lag-major, column-major within lag. */
MARKIT_API markit_status markit_series_acf(const markit_series* s, int max_lag, double* buf);
MARKIT_API void markit_series_free(markit_series* s);

/* ---- model ---- */
MARKIT_API markit_status markit_model_new(int m, int n, const double* a, const double* b,
                                          markit_model** out);
MARKIT_API markit_status markit_model_random(int m, int n, double rho_target, uint64_t seed,
                                             markit_model** out);
MARKIT_API markit_status markit_model_set_cov_identity(markit_model* mod);
MARKIT_API markit_status markit_model_set_cov_diagonal(markit_model* mod, const double* v,
                                                       int len);
MARKIT_API markit_status markit_model_set_cov_full(markit_model* mod, const double* sigma);
MARKIT_API markit_status markit_model_set_cov_kronecker(markit_model* mod, const double* sc,
                                                        const double* sr);
MARKIT_API markit_status markit_model_set_cov_random(markit_model* mod, int setting,
                                                     uint64_t seed);
MARKIT_API markit_status markit_model_dims(const markit_model* mod, int* m, int* n);
MARKIT_API markit_status markit_model_get_a(const markit_model* mod, double* buf);
MARKIT_API markit_status markit_model_get_b(const markit_model* mod, double* buf);
MARKIT_API markit_status markit_model_cov_kind(const markit_model* mod, int* kind);
/* Dense mn x mn covariance. */
MARKIT_API markit_status markit_model_get_sigma(const markit_model* mod, double* buf);
MARKIT_API markit_status markit_model_get_sigma_kron(const markit_model* mod, double* sc,
                                                     double* sr);
MARKIT_API markit_status markit_model_stationary(const markit_model* mod, int* stationary,
                                                 double* rho_product);
MARKIT_API markit_status markit_model_simulate(const markit_model* mod, int T, int burn_in,
                                               uint64_t seed, markit_series** out);
MARKIT_API markit_status markit_model_autocov(const markit_model* mod, int k, double* buf);
MARKIT_API void markit_model_free(markit_model* mod);

/* ---- estimators ---- */
MARKIT_API markit_status markit_var1_fit(const markit_series* s, markit_var1** out);
MARKIT_API markit_status markit_var1_get(const markit_var1* v, double* phi, double* sigma,
                                         double* gamma0, int* t_eff);
/* Covariance of vec(Phi_hat): (Gamma0^-1 (x) Sigma)/T, side (mn)^2. */
MARKIT_API markit_status markit_var1_cov(const markit_var1* v, double* buf);
MARKIT_API void markit_var1_free(markit_var1* v);

MARKIT_API markit_status markit_estimate(const markit_series* s, markit_method method, int max_iter,
                                    double rel_tol, markit_fit** out);
MARKIT_API markit_status markit_fit_info(const markit_fit* f, int* iterations, int* converged,
                                         int* ridge_events, int* stationary);
MARKIT_API markit_status markit_fit_method(const markit_fit* f, int* method);
/* Copy of the fitted model (caller frees). */
MARKIT_API markit_status markit_fit_model(const markit_fit* f, markit_model** out);
MARKIT_API markit_status markit_fit_objective_trace(const markit_fit* f, double* buf, int* len);
MARKIT_API markit_status markit_fit_residuals(const markit_fit* f, markit_series** out);
MARKIT_API markit_status markit_fit_rss(const markit_fit* f, double* out);
MARKIT_API void markit_fit_free(markit_fit* f);

/* ---- inference ---- */
/* PROJ needs the VAR(1) fit; pass NULL to let the call fit it internally. */
MARKIT_API markit_status markit_acov_compute(const markit_fit* f, const markit_series* s,
                                     const markit_var1* v, markit_acov** out);
/* layout: 0 = stacked (vec A, vec B); 1 = stacked (vec A, vec B^T). */
MARKIT_API markit_status markit_acov_layout(const markit_acov* a, int* layout);
MARKIT_API markit_status markit_acov_dims(const markit_acov* a, int* stacked_dim,
                                          int* kron_dim);
MARKIT_API markit_status markit_acov_stacked(const markit_acov* a, double* buf);
MARKIT_API markit_status markit_acov_kron(const markit_acov* a, double* buf);
MARKIT_API void markit_acov_free(markit_acov* a);

MARKIT_API markit_status markit_confidence_intervals(const markit_fit* f, const markit_acov* a,
                                                     double level, markit_ci** out);
MARKIT_API markit_status markit_ci_dims(const markit_ci* c, int* stacked_dim, int* kron_dim);
MARKIT_API markit_status markit_ci_stacked(const markit_ci* c, double* est, double* lower,
                                           double* upper);
MARKIT_API markit_status markit_ci_kron(const markit_ci* c, double* est, double* lower,
                                        double* upper);
MARKIT_API void markit_ci_free(markit_ci* c);

MARKIT_API markit_status markit_spec_test(const markit_series* s, double* statistic, int* df,
                                          double* p_value, int* rank_warning);

/* ---- scalar distribution helpers ---- */
/* Standard normal quantile at probability p in (0,1). */
MARKIT_API markit_status markit_normal_quantile(double p, double* out);
/* Upper tail P(chi2_df > x); x <= 0 gives 1. */
MARKIT_API markit_status markit_chi2_tail(double x, int df, double* out);

/* ---- impulse responses ---- */
MARKIT_API markit_status markit_irf_compute(const markit_model* mod, int i, int j, int horizon,
                                    markit_irf** out);
MARKIT_API markit_status markit_irf_info(const markit_irf* r, int* horizon, int* factored);
MARKIT_API markit_status markit_irf_response(const markit_irf* r, int k, double* buf);
MARKIT_API markit_status markit_irf_accumulated(const markit_irf* r, int k, double* buf);
MARKIT_API markit_status markit_irf_factors(const markit_irf* r, int k, double* row_resp,
                                            double* col_resp);
MARKIT_API void markit_irf_free(markit_irf* r);

/* ---- forecasting ---- */
MARKIT_API markit_status markit_rolling_forecast(const markit_series* s, int t0,
                                                 markit_fc_method method, int refit_each_step,
                                                 markit_forecast** out);
MARKIT_API markit_status markit_forecast_info(const markit_forecast* f, int* steps,
                                              double* total);
MARKIT_API markit_status markit_forecast_step(const markit_forecast* f, int k, double* sqerr,
                                              double* prediction);
MARKIT_API void markit_forecast_free(markit_forecast* f);

/* ---- experiments ---- */
MARKIT_API markit_status markit_experiment_compare(int m, int n, int setting, const int* Ts,
                                                   int n_T, int reps, uint64_t seed,
                                                   markit_table** out);
MARKIT_API markit_status markit_experiment_coverage(int m, int n, int setting, int T, int reps,
                                                    double level, uint64_t seed,
                                                    markit_table** out);
MARKIT_API markit_status markit_experiment_power(int m, int n, int T, const double* etas,
                                                 int n_etas, int reps, double level,
                                                 uint64_t seed, markit_table** out);
MARKIT_API markit_status markit_table_rows(const markit_table* t, int* out);
/* String fields are owned by the table handle. */
MARKIT_API markit_status markit_table_row(const markit_table* t, int i, const char** setting,
                                          const char** method, int* T, const char** stat,
                                          double* value);
MARKIT_API void markit_table_free(markit_table* t);

#ifdef __cplusplus
}
#endif

#endif /* MARKIT_H */
