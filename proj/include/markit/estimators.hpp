#pragma once

#include <vector>

#include "markit/model.hpp"
#include "markit/types.hpp"

namespace markit {

struct Var1Fit {
  Matrix phi;     // mn x mn coefficient matrix
  Matrix sigma;   // mn x mn residual covariance (divisor T-1)
  Matrix gamma0;  // mn x mn lagged sample covariance (divisor T-1)
  int t_eff = 0;  // regression rows, T-1
};

// OLS fit of vec(X_t) = Phi vec(X_{t-1}) + e_t.
Var1Fit fit_var1(const MatrixSeries& series);

struct FitOptions {
  enum class Init { FromProjection, Provided, Identity };

  int max_iter = 500;
  double rel_tol = 1e-8;
  Init init = Init::FromProjection;
  Matrix a0;  // used when init == Provided
  Matrix b0;
};

struct MarFit {
  MarModel model;  // a unit-Frobenius and sign-fixed; cov per method
  Method method = Method::Proj;
  int iterations = 0;
  std::vector<double> objective_trace;  // nonincreasing
  bool converged = false;
  MatrixSeries residuals;  // T-1 matrices, t = 2..T
  Matrix sigma_resid;      // mn x mn sample covariance of vec residuals
  int ridge_events = 0;    // covariance ridge repairs during MLE cycles
  bool stationary = true;  // warning flag; causality is not enforced
};

MarFit fit_proj(const MatrixSeries& series);
MarFit fit_lse(const MatrixSeries& series, const FitOptions& opts = {});
MarFit fit_mle(const MatrixSeries& series, const FitOptions& opts = {});

// A_unit = s A/||A||_F, B_scaled = s ||A||_F B with the kron_core sign rule;
// kron(B_scaled, A_unit) == kron(B, A).
void normalize_pair(Matrix& a, Matrix& b);

namespace detail {

// Exact blockwise minimizers, exposed for direct verification. The MLE
// updates reduce to the LSE ones when the covariance factors are identity.
Matrix lse_update_a(const MatrixSeries& s, const Matrix& b);
Matrix lse_update_b(const MatrixSeries& s, const Matrix& a);
Matrix mle_update_a(const MatrixSeries& s, const Matrix& b, const Matrix& sigma_c);
Matrix mle_update_b(const MatrixSeries& s, const Matrix& a, const Matrix& sigma_r);
Matrix mle_update_sigma_c(const MatrixSeries& s, const Matrix& a, const Matrix& b,
                          const Matrix& sigma_r);
Matrix mle_update_sigma_r(const MatrixSeries& s, const Matrix& a, const Matrix& b,
                          const Matrix& sigma_c);
double lse_objective(const MatrixSeries& s, const Matrix& a, const Matrix& b);

}  // namespace detail

}  // namespace markit
