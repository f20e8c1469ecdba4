#include "markit/forecast.hpp"

#include <Eigen/QR>

#include <cmath>
#include <string>

#include "markit/kron.hpp"

namespace markit {

const char* forecast_method_name(ForecastMethod m) {
  switch (m) {
    case ForecastMethod::Proj: return "proj";
    case ForecastMethod::Lse: return "lse";
    case ForecastMethod::Mle: return "mle";
    case ForecastMethod::Var1: return "var1";
    case ForecastMethod::IAr1: return "iar1";
    case ForecastMethod::IAr2: return "iar2";
  }
  return "lse";
}

ForecastMethod forecast_method_from_name(const std::string& name) {
  if (name == "proj") return ForecastMethod::Proj;
  if (name == "lse") return ForecastMethod::Lse;
  if (name == "mle" || name == "mles") return ForecastMethod::Mle;
  if (name == "var1") return ForecastMethod::Var1;
  if (name == "iar1") return ForecastMethod::IAr1;
  if (name == "iar2") return ForecastMethod::IAr2;
  throw ParseError("unknown forecast method '" + name +
                   "' (expected proj, lse, mle, var1, iar1, or iar2)");
}

Matrix predict_one(const MarModel& model, const Matrix& x) {
  if (x.rows() != model.m() || x.cols() != model.n())
    throw DimensionError("predict_one: state shape does not match the model");
  return model.a * x * model.b.transpose();
}

Matrix predict_one(const MarFit& fit, const Matrix& x) { return predict_one(fit.model, x); }

MatrixSeries residuals(const MatrixSeries& series, const MarModel& model) {
  series.validate();
  if (series.m != model.m() || series.n != model.n())
    throw DimensionError("residuals: series shape does not match the model");
  if (series.T() < 2) throw PreconditionError("residuals: need at least 2 observations");
  MatrixSeries r;
  r.m = series.m;
  r.n = series.n;
  r.row_labels = series.row_labels;
  r.col_labels = series.col_labels;
  r.x.reserve(static_cast<size_t>(series.T() - 1));
  for (int t = 1; t < series.T(); ++t)
    r.x.push_back(series.x[static_cast<size_t>(t)] -
                  predict_one(model, series.x[static_cast<size_t>(t - 1)]));
  return r;
}

MatrixSeries residuals(const MatrixSeries& series, const MarFit& fit) {
  return residuals(series, fit.model);
}

double rss(const MatrixSeries& resid) {
  double total = 0.0;
  for (const Matrix& rt : resid.x) total += rt.squaredNorm();
  return total;
}

AcfReport acf(const MatrixSeries& series, int max_lag) {
  series.validate();
  const int T = series.T();
  if (max_lag < 0 || max_lag >= T)
    throw PreconditionError("acf: max_lag must be in [0, T-1]");

  AcfReport rep;
  rep.sample_size = T;
  rep.r.assign(static_cast<size_t>(max_lag) + 1, Matrix::Zero(series.m, series.n));
  for (int i = 0; i < series.m; ++i) {
    for (int j = 0; j < series.n; ++j) {
      Vector y(T);
      for (int t = 0; t < T; ++t) y(t) = series.x[static_cast<size_t>(t)](i, j);
      const double mean = y.mean();
      y.array() -= mean;
      const double c0 = y.squaredNorm();
      rep.r[0](i, j) = 1.0;
      for (int k = 1; k <= max_lag; ++k) {
        // constant entry series get zero autocorrelation past lag 0
        const double ck = c0 > 0.0 ? y.head(T - k).dot(y.tail(T - k)) : 0.0;
        rep.r[static_cast<size_t>(k)](i, j) = c0 > 0.0 ? ck / c0 : 0.0;
      }
    }
  }
  return rep;
}

namespace {

// Per-entry AR(p) with intercept, OLS on the entry's own history.
struct ScalarArFit {
  Vector coef;  // intercept first, then lag 1..p
};

ScalarArFit fit_scalar_ar(const Vector& y, int p) {
  const Eigen::Index len = y.size();
  if (len - p < p + 1)
    throw PreconditionError("rolling_forecast: history too short for an order-" +
                            std::to_string(p) + " scalar model");
  Matrix design(len - p, p + 1);
  Vector target = y.tail(len - p);
  design.col(0).setOnes();
  for (int lag = 1; lag <= p; ++lag) design.col(lag) = y.segment(p - lag, len - p);
  ScalarArFit fit;
  fit.coef = design.colPivHouseholderQr().solve(target);
  return fit;
}

double predict_scalar_ar(const ScalarArFit& fit, const Vector& y) {
  const int p = static_cast<int>(fit.coef.size()) - 1;
  double pred = fit.coef(0);
  for (int lag = 1; lag <= p; ++lag) pred += fit.coef(lag) * y(y.size() - lag);
  return pred;
}

Matrix predict_iar(const MatrixSeries& history, int p, bool refit,
                   std::vector<std::vector<ScalarArFit>>& cache) {
  const int len = history.T();
  Matrix pred(history.m, history.n);
  const bool build = refit || cache.empty();
  if (build) cache.assign(static_cast<size_t>(history.m),
                          std::vector<ScalarArFit>(static_cast<size_t>(history.n)));
  for (int i = 0; i < history.m; ++i) {
    for (int j = 0; j < history.n; ++j) {
      Vector y(len);
      for (int t = 0; t < len; ++t) y(t) = history.x[static_cast<size_t>(t)](i, j);
      if (build) cache[static_cast<size_t>(i)][static_cast<size_t>(j)] = fit_scalar_ar(y, p);
      pred(i, j) = predict_scalar_ar(cache[static_cast<size_t>(i)][static_cast<size_t>(j)], y);
    }
  }
  return pred;
}

}  // namespace

ForecastReport rolling_forecast(const MatrixSeries& series, int t0, ForecastMethod method,
                                bool refit_each_step, const FitOptions& opts) {
  series.validate();
  const int T = series.T();
  if (t0 < 2 || t0 > T)
    throw PreconditionError("rolling_forecast: start must be in [2, T], got " +
                            std::to_string(t0));

  ForecastReport rep;
  rep.method = method;
  rep.t0 = t0;
  rep.refit_each_step = refit_each_step;
  rep.predictions.reserve(static_cast<size_t>(T - t0 + 1));
  rep.step_sqerr.reserve(static_cast<size_t>(T - t0 + 1));

  // cached single fits for refit_each_step == false
  bool have_model = false;
  MarModel model;
  Matrix phi;
  std::vector<std::vector<ScalarArFit>> scalar_cache;

  for (int t = t0; t <= T; ++t) {  // 1-based target index
    const MatrixSeries history = series.head(t - 1);
    const Matrix& xlast = series.x[static_cast<size_t>(t - 2)];
    Matrix pred;
    switch (method) {
      case ForecastMethod::Proj:
        if (refit_each_step || !have_model) {
          model = fit_proj(history).model;
          have_model = true;
        }
        pred = predict_one(model, xlast);
        break;
      case ForecastMethod::Lse:
        if (refit_each_step || !have_model) {
          model = fit_lse(history, opts).model;
          have_model = true;
        }
        pred = predict_one(model, xlast);
        break;
      case ForecastMethod::Mle:
        if (refit_each_step || !have_model) {
          model = fit_mle(history, opts).model;
          have_model = true;
        }
        pred = predict_one(model, xlast);
        break;
      case ForecastMethod::Var1:
        if (refit_each_step || !have_model) {
          phi = fit_var1(history).phi;
          have_model = true;
        }
        pred = unvec(phi * vec(xlast), series.m, series.n);
        break;
      case ForecastMethod::IAr1:
        pred = predict_iar(history, 1, refit_each_step, scalar_cache);
        break;
      case ForecastMethod::IAr2:
        pred = predict_iar(history, 2, refit_each_step, scalar_cache);
        break;
    }
    const double err = (pred - series.x[static_cast<size_t>(t - 1)]).squaredNorm();
    rep.predictions.push_back(std::move(pred));
    rep.step_sqerr.push_back(err);
    rep.total += err;
  }
  return rep;
}

}  // namespace markit
