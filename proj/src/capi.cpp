#include "markit.h"

#include <Eigen/LU>

#include <cstring>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "markit/estimators.hpp"
#include "markit/experiment.hpp"
#include "markit/forecast.hpp"
#include "markit/inference.hpp"
#include "markit/io.hpp"
#include "markit/kron.hpp"
#include "markit/model.hpp"
#include "markit/types.hpp"

struct markit_series {
  markit::MatrixSeries s;
};
struct markit_model {
  markit::MarModel m;
};
struct markit_var1 {
  markit::Var1Fit v;
};
struct markit_fit {
  markit::MarFit f;
};
struct markit_acov {
  markit::AsymptoticCovariance a;
};
struct markit_ci {
  markit::ConfidenceIntervals c;
};
struct markit_irf {
  markit::IrfResult r;
  int m = 0;
  int n = 0;
};
struct markit_forecast {
  markit::ForecastReport r;
  int m = 0;
  int n = 0;
};
struct markit_table {
  std::vector<markit::ExperimentRow> rows;
};

namespace {

thread_local std::string g_last_error = "no error";

void set_error(const char* msg) { g_last_error = msg; }

markit_status fail(markit_status st, const char* msg) {
  set_error(msg);
  return st;
}

template <typename F>
markit_status guard(F&& fn) noexcept {
  try {
    return fn();
  } catch (const markit::DimensionError& e) {
    return fail(MARKIT_ERR_DIMENSION, e.what());
  } catch (const markit::PreconditionError& e) {
    return fail(MARKIT_ERR_PRECONDITION, e.what());
  } catch (const markit::ParseError& e) {
    return fail(MARKIT_ERR_PARSE, e.what());
  } catch (const markit::NumericError& e) {
    return fail(MARKIT_ERR_NUMERIC, e.what());
  } catch (const markit::IoError& e) {
    return fail(MARKIT_ERR_IO, e.what());
  } catch (const std::exception& e) {
    return fail(MARKIT_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MARKIT_ERR_INTERNAL, "unknown internal failure");
  }
}

markit_status require(bool ok, const char* msg) {
  return ok ? MARKIT_OK : fail(MARKIT_ERR_INVALID_ARG, msg);
}

void copy_matrix(const markit::Matrix& m, double* buf) {
  std::memcpy(buf, m.data(), sizeof(double) * static_cast<size_t>(m.size()));
}

markit::Matrix from_buffer(const double* buf, int rows, int cols) {
  return Eigen::Map<const markit::Matrix>(buf, rows, cols);
}

}  // namespace

extern "C" {

const char* markit_version(void) { return "0.1.0"; }

const char* markit_last_error(void) { return g_last_error.c_str(); }

/* ---- series ---- */

markit_status markit_series_load_csv(const char* path, markit_series** out) {
  if (markit_status st = require(path && out, "markit_series_load_csv: NULL argument"))
    return st;
  return guard([&] {
    auto handle = std::make_unique<markit_series>();
    handle->s = markit::load_series(path);
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_series_save_csv(const markit_series* s, const char* path) {
  if (markit_status st = require(s && path, "markit_series_save_csv: NULL argument")) return st;
  return guard([&] {
    markit::save_series(s->s, path);
    return MARKIT_OK;
  });
}

markit_status markit_series_new(int m, int n, int T, const double* values, markit_series** out) {
  if (markit_status st = require(values && out, "markit_series_new: NULL argument")) return st;
  return guard([&] {
    auto handle = std::make_unique<markit_series>();
    handle->s = markit::MatrixSeries::create(m, n, T);
    for (int t = 0; t < T; ++t)
      handle->s.x[static_cast<size_t>(t)] =
          from_buffer(values + static_cast<size_t>(t) * m * n, m, n);
    handle->s.validate();
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_series_dims(const markit_series* s, int* m, int* n, int* T) {
  if (markit_status st = require(s && m && n && T, "markit_series_dims: NULL argument"))
    return st;
  *m = s->s.m;
  *n = s->s.n;
  *T = s->s.T();
  return MARKIT_OK;
}

markit_status markit_series_row_label(const markit_series* s, int i, const char** out) {
  if (markit_status st = require(s && out, "markit_series_row_label: NULL argument")) return st;
  if (i < 0 || i >= s->s.m)
    return fail(MARKIT_ERR_INVALID_ARG, "markit_series_row_label: index out of range");
  *out = s->s.row_labels[static_cast<size_t>(i)].c_str();
  return MARKIT_OK;
}

markit_status markit_series_col_label(const markit_series* s, int j, const char** out) {
  if (markit_status st = require(s && out, "markit_series_col_label: NULL argument")) return st;
  if (j < 0 || j >= s->s.n)
    return fail(MARKIT_ERR_INVALID_ARG, "markit_series_col_label: index out of range");
  *out = s->s.col_labels[static_cast<size_t>(j)].c_str();
  return MARKIT_OK;
}

markit_status markit_series_get(const markit_series* s, int t, double* buf) {
  if (markit_status st = require(s && buf, "markit_series_get: NULL argument")) return st;
  if (t < 0 || t >= s->s.T())
    return fail(MARKIT_ERR_INVALID_ARG, "markit_series_get: time index out of range");
  copy_matrix(s->s.x[static_cast<size_t>(t)], buf);
  return MARKIT_OK;
}

markit_status markit_series_preprocess(const markit_series* s, const char* steps,
                                       markit_series** out) {
  if (markit_status st = require(s && steps && out, "markit_series_preprocess: NULL argument"))
    return st;
  return guard([&] {
    auto handle = std::make_unique<markit_series>();
    handle->s = markit::preprocess(s->s, markit::parse_preprocess(steps));
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_series_rss(const markit_series* s, double* out) {
  if (markit_status st = require(s && out, "markit_series_rss: NULL argument")) return st;
  return guard([&] {
    *out = markit::rss(s->s);
    return MARKIT_OK;
  });
}

markit_status markit_series_acf(const markit_series* s, int max_lag, double* buf) {
  if (markit_status st = require(s && buf, "markit_series_acf: NULL argument")) return st;
  return guard([&] {
    const markit::AcfReport rep = markit::acf(s->s, max_lag);
    for (size_t k = 0; k < rep.r.size(); ++k)
      copy_matrix(rep.r[k], buf + k * static_cast<size_t>(s->s.m) * s->s.n);
    return MARKIT_OK;
  });
}

void markit_series_free(markit_series* s) { delete s; }

/* ---- model ---- */

markit_status markit_model_new(int m, int n, const double* a, const double* b,
                               markit_model** out) {
  if (markit_status st = require(a && b && out, "markit_model_new: NULL argument")) return st;
  if (m < 1 || n < 1) return fail(MARKIT_ERR_INVALID_ARG, "markit_model_new: bad dimensions");
  return guard([&] {
    auto handle = std::make_unique<markit_model>();
    handle->m = markit::MarModel(from_buffer(a, m, m), from_buffer(b, n, n));
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_model_random(int m, int n, double rho_target, uint64_t seed,
                                  markit_model** out) {
  if (markit_status st = require(out != nullptr, "markit_model_random: NULL argument"))
    return st;
  return guard([&] {
    auto handle = std::make_unique<markit_model>();
    handle->m = markit::random_model(m, n, rho_target, seed);
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_model_set_cov_identity(markit_model* mod) {
  if (markit_status st = require(mod != nullptr, "markit_model_set_cov_identity: NULL argument"))
    return st;
  mod->m.cov = markit::CovarianceSpec::identity();
  return MARKIT_OK;
}

markit_status markit_model_set_cov_diagonal(markit_model* mod, const double* v, int len) {
  if (markit_status st = require(mod && v, "markit_model_set_cov_diagonal: NULL argument"))
    return st;
  return guard([&] {
    markit::CovarianceSpec cov =
        markit::CovarianceSpec::diagonal(Eigen::Map<const markit::Vector>(v, len));
    cov.check_dims(mod->m.m(), mod->m.n());
    mod->m.cov = std::move(cov);
    return MARKIT_OK;
  });
}

markit_status markit_model_set_cov_full(markit_model* mod, const double* sigma) {
  if (markit_status st = require(mod && sigma, "markit_model_set_cov_full: NULL argument"))
    return st;
  return guard([&] {
    const int mn = mod->m.m() * mod->m.n();
    markit::CovarianceSpec cov = markit::CovarianceSpec::full(from_buffer(sigma, mn, mn));
    mod->m.cov = std::move(cov);
    return MARKIT_OK;
  });
}

markit_status markit_model_set_cov_kronecker(markit_model* mod, const double* sc,
                                             const double* sr) {
  if (markit_status st = require(mod && sc && sr, "markit_model_set_cov_kronecker: NULL argument"))
    return st;
  return guard([&] {
    mod->m.cov = markit::CovarianceSpec::kronecker(from_buffer(sc, mod->m.n(), mod->m.n()),
                                                   from_buffer(sr, mod->m.m(), mod->m.m()));
    return MARKIT_OK;
  });
}

markit_status markit_model_set_cov_random(markit_model* mod, int setting, uint64_t seed) {
  if (markit_status st = require(mod != nullptr, "markit_model_set_cov_random: NULL argument"))
    return st;
  return guard([&] {
    mod->m.cov = markit::random_covariance(setting, mod->m.m(), mod->m.n(), seed);
    return MARKIT_OK;
  });
}

markit_status markit_model_dims(const markit_model* mod, int* m, int* n) {
  if (markit_status st = require(mod && m && n, "markit_model_dims: NULL argument")) return st;
  *m = mod->m.m();
  *n = mod->m.n();
  return MARKIT_OK;
}

markit_status markit_model_get_a(const markit_model* mod, double* buf) {
  if (markit_status st = require(mod && buf, "markit_model_get_a: NULL argument")) return st;
  copy_matrix(mod->m.a, buf);
  return MARKIT_OK;
}

markit_status markit_model_get_b(const markit_model* mod, double* buf) {
  if (markit_status st = require(mod && buf, "markit_model_get_b: NULL argument")) return st;
  copy_matrix(mod->m.b, buf);
  return MARKIT_OK;
}

markit_status markit_model_cov_kind(const markit_model* mod, int* kind) {
  if (markit_status st = require(mod && kind, "markit_model_cov_kind: NULL argument")) return st;
  *kind = static_cast<int>(mod->m.cov.kind);
  return MARKIT_OK;
}

markit_status markit_model_get_sigma(const markit_model* mod, double* buf) {
  if (markit_status st = require(mod && buf, "markit_model_get_sigma: NULL argument")) return st;
  return guard([&] {
    copy_matrix(mod->m.cov.dense(mod->m.m(), mod->m.n()), buf);
    return MARKIT_OK;
  });
}

markit_status markit_model_get_sigma_kron(const markit_model* mod, double* sc, double* sr) {
  if (markit_status st = require(mod && sc && sr, "markit_model_get_sigma_kron: NULL argument"))
    return st;
  if (mod->m.cov.kind != markit::CovarianceSpec::Kind::Kronecker)
    return fail(MARKIT_ERR_PRECONDITION,
                "markit_model_get_sigma_kron: covariance is not Kronecker");
  copy_matrix(mod->m.cov.sigma_c, sc);
  copy_matrix(mod->m.cov.sigma_r, sr);
  return MARKIT_OK;
}

markit_status markit_model_stationary(const markit_model* mod, int* stationary,
                                      double* rho_product) {
  if (markit_status st =
          require(mod && stationary && rho_product, "markit_model_stationary: NULL argument"))
    return st;
  return guard([&] {
    const markit::StationarityCheck chk = markit::is_stationary(mod->m);
    *stationary = chk.stationary ? 1 : 0;
    *rho_product = chk.rho_product;
    return MARKIT_OK;
  });
}

markit_status markit_model_simulate(const markit_model* mod, int T, int burn_in, uint64_t seed,
                                    markit_series** out) {
  if (markit_status st = require(mod && out, "markit_model_simulate: NULL argument")) return st;
  return guard([&] {
    auto handle = std::make_unique<markit_series>();
    handle->s = markit::simulate(mod->m, T, seed, burn_in);
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_model_autocov(const markit_model* mod, int k, double* buf) {
  if (markit_status st = require(mod && buf, "markit_model_autocov: NULL argument")) return st;
  return guard([&] {
    copy_matrix(markit::autocovariance(mod->m, k), buf);
    return MARKIT_OK;
  });
}

void markit_model_free(markit_model* mod) { delete mod; }

/* ---- estimators ---- */

markit_status markit_var1_fit(const markit_series* s, markit_var1** out) {
  if (markit_status st = require(s && out, "markit_var1_fit: NULL argument")) return st;
  return guard([&] {
    auto handle = std::make_unique<markit_var1>();
    handle->v = markit::fit_var1(s->s);
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_var1_get(const markit_var1* v, double* phi, double* sigma, double* gamma0,
                              int* t_eff) {
  if (markit_status st = require(v != nullptr, "markit_var1_get: NULL argument")) return st;
  if (phi) copy_matrix(v->v.phi, phi);
  if (sigma) copy_matrix(v->v.sigma, sigma);
  if (gamma0) copy_matrix(v->v.gamma0, gamma0);
  if (t_eff) *t_eff = v->v.t_eff;
  return MARKIT_OK;
}

markit_status markit_var1_cov(const markit_var1* v, double* buf) {
  if (markit_status st = require(v && buf, "markit_var1_cov: NULL argument")) return st;
  return guard([&] {
    Eigen::FullPivLU<markit::Matrix> lu(v->v.gamma0);
    if (!lu.isInvertible())
      throw markit::NumericError("markit_var1_cov: sample covariance is singular");
    const markit::Matrix cov =
        markit::kron(lu.inverse(), v->v.sigma) / static_cast<double>(v->v.t_eff + 1);
    copy_matrix(cov, buf);
    return MARKIT_OK;
  });
}

void markit_var1_free(markit_var1* v) { delete v; }

markit_status markit_estimate(const markit_series* s, markit_method method, int max_iter,
                         double rel_tol, markit_fit** out) {
  if (markit_status st = require(s && out, "markit_fit: NULL argument")) return st;
  return guard([&] {
    markit::FitOptions opts;
    if (max_iter > 0) opts.max_iter = max_iter;
    if (rel_tol > 0.0) opts.rel_tol = rel_tol;
    auto handle = std::make_unique<markit_fit>();
    switch (method) {
      case MARKIT_METHOD_PROJ: handle->f = markit::fit_proj(s->s); break;
      case MARKIT_METHOD_LSE: handle->f = markit::fit_lse(s->s, opts); break;
      case MARKIT_METHOD_MLE: handle->f = markit::fit_mle(s->s, opts); break;
      default: return fail(MARKIT_ERR_INVALID_ARG, "markit_fit: unknown method");
    }
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_fit_info(const markit_fit* f, int* iterations, int* converged,
                              int* ridge_events, int* stationary) {
  if (markit_status st = require(f != nullptr, "markit_fit_info: NULL argument")) return st;
  if (iterations) *iterations = f->f.iterations;
  if (converged) *converged = f->f.converged ? 1 : 0;
  if (ridge_events) *ridge_events = f->f.ridge_events;
  if (stationary) *stationary = f->f.stationary ? 1 : 0;
  return MARKIT_OK;
}

markit_status markit_fit_method(const markit_fit* f, int* method) {
  if (markit_status st = require(f && method, "markit_fit_method: NULL argument")) return st;
  *method = static_cast<int>(f->f.method);
  return MARKIT_OK;
}

markit_status markit_fit_model(const markit_fit* f, markit_model** out) {
  if (markit_status st = require(f && out, "markit_fit_model: NULL argument")) return st;
  return guard([&] {
    auto handle = std::make_unique<markit_model>();
    handle->m = f->f.model;
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_fit_objective_trace(const markit_fit* f, double* buf, int* len) {
  if (markit_status st = require(f && len, "markit_fit_objective_trace: NULL argument"))
    return st;
  if (buf)
    std::memcpy(buf, f->f.objective_trace.data(),
                sizeof(double) * f->f.objective_trace.size());
  *len = static_cast<int>(f->f.objective_trace.size());
  return MARKIT_OK;
}

markit_status markit_fit_residuals(const markit_fit* f, markit_series** out) {
  if (markit_status st = require(f && out, "markit_fit_residuals: NULL argument")) return st;
  return guard([&] {
    auto handle = std::make_unique<markit_series>();
    handle->s = f->f.residuals;
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_fit_rss(const markit_fit* f, double* out) {
  if (markit_status st = require(f && out, "markit_fit_rss: NULL argument")) return st;
  *out = markit::rss(f->f.residuals);
  return MARKIT_OK;
}

void markit_fit_free(markit_fit* f) { delete f; }

/* ---- inference ---- */

markit_status markit_acov_compute(const markit_fit* f, const markit_series* s, const markit_var1* v,
                          markit_acov** out) {
  if (markit_status st = require(f && out, "markit_acov: NULL argument")) return st;
  return guard([&] {
    auto handle = std::make_unique<markit_acov>();
    switch (f->f.method) {
      case markit::Method::Proj: {
        if (v) {
          handle->a = markit::asymp_cov_proj(f->f, v->v);
        } else {
          if (!s)
            return fail(MARKIT_ERR_INVALID_ARG,
                        "markit_acov: PROJ needs a VAR(1) fit or the series");
          handle->a = markit::asymp_cov_proj(f->f, markit::fit_var1(s->s));
        }
        break;
      }
      case markit::Method::Lse:
        if (!s) return fail(MARKIT_ERR_INVALID_ARG, "markit_acov: LSE needs the series");
        handle->a = markit::asymp_cov_lse(f->f, s->s);
        break;
      case markit::Method::Mle:
        if (!s) return fail(MARKIT_ERR_INVALID_ARG, "markit_acov: MLE needs the series");
        handle->a = markit::asymp_cov_mle(f->f, s->s);
        break;
    }
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_acov_layout(const markit_acov* a, int* layout) {
  if (markit_status st = require(a && layout, "markit_acov_layout: NULL argument")) return st;
  *layout = a->a.method == markit::Method::Proj ? 0 : 1;
  return MARKIT_OK;
}

markit_status markit_acov_dims(const markit_acov* a, int* stacked_dim, int* kron_dim) {
  if (markit_status st = require(a && stacked_dim && kron_dim, "markit_acov_dims: NULL argument"))
    return st;
  *stacked_dim = static_cast<int>(a->a.stacked_cov.rows());
  *kron_dim = static_cast<int>(a->a.kron_cov.rows());
  return MARKIT_OK;
}

markit_status markit_acov_stacked(const markit_acov* a, double* buf) {
  if (markit_status st = require(a && buf, "markit_acov_stacked: NULL argument")) return st;
  copy_matrix(a->a.stacked_cov, buf);
  return MARKIT_OK;
}

markit_status markit_acov_kron(const markit_acov* a, double* buf) {
  if (markit_status st = require(a && buf, "markit_acov_kron: NULL argument")) return st;
  copy_matrix(a->a.kron_cov, buf);
  return MARKIT_OK;
}

void markit_acov_free(markit_acov* a) { delete a; }

markit_status markit_confidence_intervals(const markit_fit* f, const markit_acov* a,
                                          double level, markit_ci** out) {
  if (markit_status st = require(f && a && out, "markit_confidence_intervals: NULL argument"))
    return st;
  return guard([&] {
    auto handle = std::make_unique<markit_ci>();
    handle->c = markit::confidence_intervals(f->f, a->a, level);
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_ci_dims(const markit_ci* c, int* stacked_dim, int* kron_dim) {
  if (markit_status st = require(c && stacked_dim && kron_dim, "markit_ci_dims: NULL argument"))
    return st;
  *stacked_dim = static_cast<int>(c->c.stacked_est.size());
  *kron_dim = static_cast<int>(c->c.kron_est.size());
  return MARKIT_OK;
}

markit_status markit_ci_stacked(const markit_ci* c, double* est, double* lower, double* upper) {
  if (markit_status st =
          require(c && est && lower && upper, "markit_ci_stacked: NULL argument"))
    return st;
  const size_t bytes = sizeof(double) * static_cast<size_t>(c->c.stacked_est.size());
  std::memcpy(est, c->c.stacked_est.data(), bytes);
  std::memcpy(lower, c->c.stacked_lower.data(), bytes);
  std::memcpy(upper, c->c.stacked_upper.data(), bytes);
  return MARKIT_OK;
}

markit_status markit_ci_kron(const markit_ci* c, double* est, double* lower, double* upper) {
  if (markit_status st = require(c && est && lower && upper, "markit_ci_kron: NULL argument"))
    return st;
  const size_t bytes = sizeof(double) * static_cast<size_t>(c->c.kron_est.size());
  std::memcpy(est, c->c.kron_est.data(), bytes);
  std::memcpy(lower, c->c.kron_lower.data(), bytes);
  std::memcpy(upper, c->c.kron_upper.data(), bytes);
  return MARKIT_OK;
}

void markit_ci_free(markit_ci* c) { delete c; }

markit_status markit_spec_test(const markit_series* s, double* statistic, int* df,
                               double* p_value, int* rank_warning) {
  if (markit_status st =
          require(s && statistic && df && p_value, "markit_spec_test: NULL argument"))
    return st;
  return guard([&] {
    const markit::SpecTestResult res = markit::specification_test(s->s);
    *statistic = res.statistic;
    *df = res.df;
    *p_value = res.p_value;
    if (rank_warning) *rank_warning = res.rank_warning ? 1 : 0;
    return MARKIT_OK;
  });
}

markit_status markit_normal_quantile(double p, double* out) {
  if (markit_status st = require(out != nullptr, "markit_normal_quantile: NULL argument"))
    return st;
  return guard([&] {
    *out = markit::normal_quantile(p);
    return MARKIT_OK;
  });
}

markit_status markit_chi2_tail(double x, int df, double* out) {
  if (markit_status st = require(out != nullptr, "markit_chi2_tail: NULL argument")) return st;
  return guard([&] {
    *out = markit::chi2_tail(x, df);
    return MARKIT_OK;
  });
}

/* ---- impulse responses ---- */

markit_status markit_irf_compute(const markit_model* mod, int i, int j, int horizon, markit_irf** out) {
  if (markit_status st = require(mod && out, "markit_irf: NULL argument")) return st;
  return guard([&] {
    auto handle = std::make_unique<markit_irf>();
    handle->r = markit::irf_s1(mod->m, i, j, horizon);
    handle->m = mod->m.m();
    handle->n = mod->m.n();
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_irf_info(const markit_irf* r, int* horizon, int* factored) {
  if (markit_status st = require(r != nullptr, "markit_irf_info: NULL argument")) return st;
  if (horizon) *horizon = static_cast<int>(r->r.responses.size()) - 1;
  if (factored) *factored = r->r.factored ? 1 : 0;
  return MARKIT_OK;
}

markit_status markit_irf_response(const markit_irf* r, int k, double* buf) {
  if (markit_status st = require(r && buf, "markit_irf_response: NULL argument")) return st;
  if (k < 0 || static_cast<size_t>(k) >= r->r.responses.size())
    return fail(MARKIT_ERR_INVALID_ARG, "markit_irf_response: lag out of range");
  copy_matrix(r->r.responses[static_cast<size_t>(k)], buf);
  return MARKIT_OK;
}

markit_status markit_irf_accumulated(const markit_irf* r, int k, double* buf) {
  if (markit_status st = require(r && buf, "markit_irf_accumulated: NULL argument")) return st;
  if (k < 0 || static_cast<size_t>(k) >= r->r.accumulated.size())
    return fail(MARKIT_ERR_INVALID_ARG, "markit_irf_accumulated: lag out of range");
  copy_matrix(r->r.accumulated[static_cast<size_t>(k)], buf);
  return MARKIT_OK;
}

markit_status markit_irf_factors(const markit_irf* r, int k, double* row_resp, double* col_resp) {
  if (markit_status st = require(r && row_resp && col_resp, "markit_irf_factors: NULL argument"))
    return st;
  if (!r->r.factored)
    return fail(MARKIT_ERR_PRECONDITION,
                "markit_irf_factors: factored responses need a Kronecker covariance");
  if (k < 0 || static_cast<size_t>(k) >= r->r.row_resp.size())
    return fail(MARKIT_ERR_INVALID_ARG, "markit_irf_factors: lag out of range");
  std::memcpy(row_resp, r->r.row_resp[static_cast<size_t>(k)].data(),
              sizeof(double) * static_cast<size_t>(r->m));
  std::memcpy(col_resp, r->r.col_resp[static_cast<size_t>(k)].data(),
              sizeof(double) * static_cast<size_t>(r->n));
  return MARKIT_OK;
}

void markit_irf_free(markit_irf* r) { delete r; }

/* ---- forecasting ---- */

markit_status markit_rolling_forecast(const markit_series* s, int t0, markit_fc_method method,
                                      int refit_each_step, markit_forecast** out) {
  if (markit_status st = require(s && out, "markit_rolling_forecast: NULL argument")) return st;
  markit::ForecastMethod fm;
  switch (method) {
    case MARKIT_FC_PROJ: fm = markit::ForecastMethod::Proj; break;
    case MARKIT_FC_LSE: fm = markit::ForecastMethod::Lse; break;
    case MARKIT_FC_MLE: fm = markit::ForecastMethod::Mle; break;
    case MARKIT_FC_VAR1: fm = markit::ForecastMethod::Var1; break;
    case MARKIT_FC_IAR1: fm = markit::ForecastMethod::IAr1; break;
    case MARKIT_FC_IAR2: fm = markit::ForecastMethod::IAr2; break;
    default: return fail(MARKIT_ERR_INVALID_ARG, "markit_rolling_forecast: unknown method");
  }
  return guard([&] {
    auto handle = std::make_unique<markit_forecast>();
    handle->r = markit::rolling_forecast(s->s, t0, fm, refit_each_step != 0);
    handle->m = s->s.m;
    handle->n = s->s.n;
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_forecast_info(const markit_forecast* f, int* steps, double* total) {
  if (markit_status st = require(f != nullptr, "markit_forecast_info: NULL argument")) return st;
  if (steps) *steps = static_cast<int>(f->r.step_sqerr.size());
  if (total) *total = f->r.total;
  return MARKIT_OK;
}

markit_status markit_forecast_step(const markit_forecast* f, int k, double* sqerr,
                                   double* prediction) {
  if (markit_status st = require(f && sqerr, "markit_forecast_step: NULL argument")) return st;
  if (k < 0 || static_cast<size_t>(k) >= f->r.step_sqerr.size())
    return fail(MARKIT_ERR_INVALID_ARG, "markit_forecast_step: step out of range");
  *sqerr = f->r.step_sqerr[static_cast<size_t>(k)];
  if (prediction) copy_matrix(f->r.predictions[static_cast<size_t>(k)], prediction);
  return MARKIT_OK;
}

void markit_forecast_free(markit_forecast* f) { delete f; }

/* ---- experiments ---- */

markit_status markit_experiment_compare(int m, int n, int setting, const int* Ts, int n_T,
                                        int reps, uint64_t seed, markit_table** out) {
  if (markit_status st = require(Ts && out, "markit_experiment_compare: NULL argument"))
    return st;
  if (n_T < 1) return fail(MARKIT_ERR_INVALID_ARG, "markit_experiment_compare: n_T < 1");
  return guard([&] {
    auto handle = std::make_unique<markit_table>();
    handle->rows =
        markit::experiment_compare(m, n, setting, std::vector<int>(Ts, Ts + n_T), reps, seed);
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_experiment_coverage(int m, int n, int setting, int T, int reps,
                                         double level, uint64_t seed, markit_table** out) {
  if (markit_status st = require(out != nullptr, "markit_experiment_coverage: NULL argument"))
    return st;
  return guard([&] {
    auto handle = std::make_unique<markit_table>();
    handle->rows = markit::experiment_coverage(m, n, setting, T, reps, level, seed);
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_experiment_power(int m, int n, int T, const double* etas, int n_etas,
                                      int reps, double level, uint64_t seed,
                                      markit_table** out) {
  if (markit_status st = require(etas && out, "markit_experiment_power: NULL argument"))
    return st;
  if (n_etas < 1) return fail(MARKIT_ERR_INVALID_ARG, "markit_experiment_power: n_etas < 1");
  return guard([&] {
    auto handle = std::make_unique<markit_table>();
    handle->rows = markit::experiment_power(m, n, T, std::vector<double>(etas, etas + n_etas),
                                            reps, level, seed);
    *out = handle.release();
    return MARKIT_OK;
  });
}

markit_status markit_table_rows(const markit_table* t, int* out) {
  if (markit_status st = require(t && out, "markit_table_rows: NULL argument")) return st;
  *out = static_cast<int>(t->rows.size());
  return MARKIT_OK;
}

markit_status markit_table_row(const markit_table* t, int i, const char** setting,
                               const char** method, int* T, const char** stat, double* value) {
  if (markit_status st = require(t != nullptr, "markit_table_row: NULL argument")) return st;
  if (i < 0 || static_cast<size_t>(i) >= t->rows.size())
    return fail(MARKIT_ERR_INVALID_ARG, "markit_table_row: index out of range");
  const markit::ExperimentRow& row = t->rows[static_cast<size_t>(i)];
  if (setting) *setting = row.setting.c_str();
  if (method) *method = row.method.c_str();
  if (T) *T = row.T;
  if (stat) *stat = row.stat.c_str();
  if (value) *value = row.value;
  return MARKIT_OK;
}

void markit_table_free(markit_table* t) { delete t; }

}  // extern "C"
