#pragma once

#include "markit/estimators.hpp"
#include "markit/model.hpp"
#include "markit/types.hpp"

namespace markit {

// Stacked-coefficient layout depends on the estimator: PROJ stacks
// (vec A, vec B); LSE and MLE stack (vec A, vec B^T). kron_cov is the
// covariance of vec(B) (x) vec(A) for PROJ, vec(B^T) (x) vec(A) otherwise.
struct AsymptoticCovariance {
  Method method = Method::Proj;
  Matrix xi;           // Xi_1 (m^2 n^2) for PROJ, Xi_2/Xi_3 (m^2+n^2) otherwise
  Matrix stacked_cov;  // (m^2+n^2) square, already divided by T
  Matrix kron_cov;     // m^2 n^2 square, already divided by T
  int t_used = 0;
};

AsymptoticCovariance asymp_cov_proj(const MarFit& fit, const Var1Fit& var1);
AsymptoticCovariance asymp_cov_lse(const MarFit& fit, const MatrixSeries& series);
AsymptoticCovariance asymp_cov_mle(const MarFit& fit, const MatrixSeries& series);

// Point estimate vectors matching the AsymptoticCovariance layouts.
Vector stacked_estimate(const MarFit& fit);
Vector kron_estimate(const MarFit& fit);

struct ConfidenceIntervals {
  double level = 0.95;
  Vector stacked_est, stacked_lower, stacked_upper;
  Vector kron_est, kron_lower, kron_upper;
};

ConfidenceIntervals confidence_intervals(const Vector& stacked_est, const Vector& kron_est,
                                         const AsymptoticCovariance& cov, double level);
ConfidenceIntervals confidence_intervals(const MarFit& fit, const AsymptoticCovariance& cov,
                                         double level);

struct SpecTestResult {
  double statistic = 0.0;
  int df = 0;  // (m^2 - 1)(n^2 - 1)
  double p_value = 1.0;
  Matrix d_hat;  // m^2 x n^2 deviation of rearrange(Phi_hat) from rank one
  Matrix p_hat;  // m^2 n^2 projection (I - beta1 beta1^T) (x) (I - alpha alpha^T)
  bool rank_warning = false;
};

// Kronecker-structure test: statistic = T vec(D)^T (P Xi1 P)^+ vec(D) with the
// pseudoinverse rank fixed to df; p-value from the chi-square upper tail.
SpecTestResult specification_test(const MatrixSeries& series);

// Upper tail P(X > x) for X ~ chi-square with df degrees of freedom.
double chi2_tail(double x, double df);
// Standard normal quantile, p in (0, 1).
double normal_quantile(double p);

}  // namespace markit
