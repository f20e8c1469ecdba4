#pragma once

#include <string>
#include <vector>

#include "markit/estimators.hpp"
#include "markit/model.hpp"
#include "markit/types.hpp"

namespace markit {

enum class ForecastMethod { Proj, Lse, Mle, Var1, IAr1, IAr2 };

const char* forecast_method_name(ForecastMethod m);
ForecastMethod forecast_method_from_name(const std::string& name);

// Conditional mean A X B^T.
Matrix predict_one(const MarModel& model, const Matrix& x);
Matrix predict_one(const MarFit& fit, const Matrix& x);

// R_t = X_t - A X_{t-1} B^T for t = 2..T.
MatrixSeries residuals(const MatrixSeries& series, const MarModel& model);
MatrixSeries residuals(const MatrixSeries& series, const MarFit& fit);

// Sum of squared Frobenius norms over the series.
double rss(const MatrixSeries& resid);

struct AcfReport {
  // r[k](i,j) is the lag-k autocorrelation of entry series (i,j); r[0] == 1.
  std::vector<Matrix> r;
  int sample_size = 0;
};

// Per-entry sample ACF, demeaned, biased (divide-by-T) denominator.
AcfReport acf(const MatrixSeries& series, int max_lag);

struct ForecastReport {
  ForecastMethod method = ForecastMethod::Lse;
  int t0 = 0;
  bool refit_each_step = true;
  std::vector<Matrix> predictions;  // for t = t0..T
  std::vector<double> step_sqerr;   // ||prediction - X_t||_F^2
  double total = 0.0;
};

// For each t in t0..T: fit on X_1..X_{t-1}, predict X_t, record the squared
// error. iAR1/iAR2 fit per-entry scalar AR models with an intercept.
ForecastReport rolling_forecast(const MatrixSeries& series, int t0, ForecastMethod method,
                                bool refit_each_step = true, const FitOptions& opts = {});

}  // namespace markit
