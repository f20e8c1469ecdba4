#include "markit/inference.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <string>
#include <vector>

#include "markit/kron.hpp"

namespace markit {

namespace {

// Xi_1[k, l] = (Gamma0^{-1} (x) Sigma)[pi(k), pi(l)] with pi the index map
// carrying the rearranged coefficient matrix back to vec(Phi).
Matrix xi1_matrix(const Matrix& gamma0, const Matrix& sigma, int m, int n) {
  Eigen::FullPivLU<Matrix> lu(gamma0);
  if (!lu.isInvertible()) throw NumericError("inference: sample covariance is singular");
  const Matrix g0inv = lu.inverse();
  const Matrix kk = kron(g0inv, sigma);
  const std::vector<Eigen::Index> pi = rearrange_permutation(m, n);
  const Eigen::Index sz = kk.rows();
  Matrix xi(sz, sz);
  for (Eigen::Index k = 0; k < sz; ++k)
    for (Eigen::Index l = 0; l < sz; ++l) xi(k, l) = kk(pi[static_cast<size_t>(k)], pi[static_cast<size_t>(l)]);
  return xi;
}

Matrix spd_inverse_or_throw(const Matrix& s, const char* what) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string(what) + ": matrix is not positive definite");
  return llt.solve(Matrix::Identity(s.rows(), s.cols()));
}

// Sandwich pieces shared by the iterative estimators. weight is either the
// identity (pass empty) or the inverse innovation covariance.
struct SandwichParts {
  Matrix gram;    // average of W (weight) W^T
  Matrix middle;  // average of W Sigma W^T (empty when weighted)
  Matrix h;       // gram + gamma gamma^T
};

SandwichParts build_sandwich(const MatrixSeries& series, const Matrix& a, const Matrix& b,
                             const Matrix* weight, const Matrix* sigma) {
  const int m = series.m, n = series.n;
  const Eigen::Index m2 = static_cast<Eigen::Index>(m) * m;
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  const Eigen::Index p = m2 + n2;
  const Matrix im = Matrix::Identity(m, m);
  const Matrix in = Matrix::Identity(n, n);

  SandwichParts parts;
  parts.gram = Matrix::Zero(p, p);
  if (sigma) parts.middle = Matrix::Zero(p, p);
  const int tm1 = series.T() - 1;
  for (int t = 1; t < series.T(); ++t) {
    const Matrix& xp = series.x[static_cast<size_t>(t - 1)];
    Matrix j(static_cast<Eigen::Index>(m) * n, p);  // W_{t-1}^T
    j.leftCols(m2) = kron(b * xp.transpose(), im);
    j.rightCols(n2) = kron(in, a * xp);
    if (weight)
      parts.gram.noalias() += j.transpose() * (*weight) * j;
    else
      parts.gram.noalias() += j.transpose() * j;
    if (sigma) parts.middle.noalias() += j.transpose() * (*sigma) * j;
  }
  parts.gram /= static_cast<double>(tm1);
  if (sigma) parts.middle /= static_cast<double>(tm1);

  Vector gamma = Vector::Zero(p);
  gamma.head(m2) = vec(a);
  parts.h = parts.gram + gamma * gamma.transpose();
  return parts;
}

// d(beta (x) alpha)/d(alpha, beta) for the iterative estimators' layouts.
Matrix kron_map(const Vector& alpha, const Vector& beta) {
  const Eigen::Index m2 = alpha.size(), n2 = beta.size();
  Matrix v(m2 * n2, m2 + n2);
  v.leftCols(m2) = kron(Matrix(beta), Matrix::Identity(m2, m2));
  v.rightCols(n2) = kron(Matrix::Identity(n2, n2), Matrix(alpha));
  return v;
}

void check_method(const MarFit& fit, Method expect, const char* what) {
  if (fit.method != expect)
    throw PreconditionError(std::string(what) + ": fit was produced by a different estimator");
}

}  // namespace

AsymptoticCovariance asymp_cov_proj(const MarFit& fit, const Var1Fit& var1) {
  check_method(fit, Method::Proj, "asymp_cov_proj");
  const int m = fit.model.m(), n = fit.model.n();
  const Eigen::Index m2 = static_cast<Eigen::Index>(m) * m;
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  if (var1.phi.rows() != static_cast<Eigen::Index>(m) * n)
    throw DimensionError("asymp_cov_proj: VAR fit does not match the model dimensions");

  const Vector alpha = vec(fit.model.a);
  const double s1 = fit.model.b.norm();
  if (!(s1 > 0.0)) throw NumericError("asymp_cov_proj: B estimate has zero norm");
  const Vector beta1 = vec(fit.model.b) / s1;

  AsymptoticCovariance out;
  out.method = Method::Proj;
  out.t_used = var1.t_eff + 1;
  out.xi = xi1_matrix(var1.gamma0, var1.sigma, m, n);

  const Matrix proj_a = Matrix::Identity(m2, m2) - alpha * alpha.transpose();
  Matrix v0(m2 + n2, m2 * n2);
  v0.topRows(m2) = kron(Matrix(beta1.transpose()), proj_a) / s1;
  v0.bottomRows(n2) = kron(Matrix::Identity(n2, n2), Matrix(alpha.transpose()));
  out.stacked_cov = v0 * out.xi * v0.transpose() / static_cast<double>(out.t_used);

  const Matrix pb = beta1 * beta1.transpose();
  const Matrix pa = alpha * alpha.transpose();
  const Matrix v1 = kron(pb, Matrix::Identity(m2, m2)) + kron(Matrix::Identity(n2, n2), pa) -
                    kron(pb, pa);
  out.kron_cov = v1 * out.xi * v1 / static_cast<double>(out.t_used);
  return out;
}

AsymptoticCovariance asymp_cov_lse(const MarFit& fit, const MatrixSeries& series) {
  check_method(fit, Method::Lse, "asymp_cov_lse");
  series.validate();
  if (series.m != fit.model.m() || series.n != fit.model.n())
    throw DimensionError("asymp_cov_lse: series does not match the fitted model");

  const Matrix& sigma = fit.sigma_resid;
  const SandwichParts parts =
      build_sandwich(series, fit.model.a, fit.model.b, nullptr, &sigma);
  const Matrix hinv = spd_inverse_or_throw(parts.h, "asymp_cov_lse");

  AsymptoticCovariance out;
  out.method = Method::Lse;
  out.t_used = series.T();
  out.xi = hinv * parts.middle * hinv;
  out.stacked_cov = out.xi / static_cast<double>(out.t_used);
  const Matrix v = kron_map(vec(fit.model.a), vec(Matrix(fit.model.b.transpose())));
  out.kron_cov = v * out.stacked_cov * v.transpose();
  return out;
}

AsymptoticCovariance asymp_cov_mle(const MarFit& fit, const MatrixSeries& series) {
  check_method(fit, Method::Mle, "asymp_cov_mle");
  series.validate();
  if (series.m != fit.model.m() || series.n != fit.model.n())
    throw DimensionError("asymp_cov_mle: series does not match the fitted model");
  if (fit.model.cov.kind != CovarianceSpec::Kind::Kronecker)
    throw PreconditionError("asymp_cov_mle: fit does not carry Kronecker covariance factors");

  const Matrix sci = spd_inverse_or_throw(fit.model.cov.sigma_c, "asymp_cov_mle");
  const Matrix sri = spd_inverse_or_throw(fit.model.cov.sigma_r, "asymp_cov_mle");
  const Matrix siginv = kron(sci, sri);
  const SandwichParts parts =
      build_sandwich(series, fit.model.a, fit.model.b, &siginv, nullptr);
  const Matrix hinv = spd_inverse_or_throw(parts.h, "asymp_cov_mle");

  AsymptoticCovariance out;
  out.method = Method::Mle;
  out.t_used = series.T();
  out.xi = hinv * parts.gram * hinv;
  out.stacked_cov = out.xi / static_cast<double>(out.t_used);
  const Matrix v = kron_map(vec(fit.model.a), vec(Matrix(fit.model.b.transpose())));
  out.kron_cov = v * out.stacked_cov * v.transpose();
  return out;
}

Vector stacked_estimate(const MarFit& fit) {
  const Eigen::Index m2 = fit.model.a.size(), n2 = fit.model.b.size();
  Vector est(m2 + n2);
  est.head(m2) = vec(fit.model.a);
  est.tail(n2) = fit.method == Method::Proj ? vec(fit.model.b)
                                            : vec(Matrix(fit.model.b.transpose()));
  return est;
}

Vector kron_estimate(const MarFit& fit) {
  const Vector alpha = vec(fit.model.a);
  const Vector beta = fit.method == Method::Proj ? vec(fit.model.b)
                                                 : vec(Matrix(fit.model.b.transpose()));
  return kron(Matrix(beta), Matrix(alpha));
}

ConfidenceIntervals confidence_intervals(const Vector& stacked_est, const Vector& kron_est,
                                         const AsymptoticCovariance& cov, double level) {
  if (!(level > 0.0 && level < 1.0))
    throw PreconditionError("confidence_intervals: level must be in (0, 1)");
  if (cov.stacked_cov.rows() != stacked_est.size() || cov.kron_cov.rows() != kron_est.size())
    throw DimensionError("confidence_intervals: estimate/covariance size mismatch");
  const double z = normal_quantile(0.5 + level / 2.0);

  ConfidenceIntervals ci;
  ci.level = level;
  ci.stacked_est = stacked_est;
  ci.kron_est = kron_est;
  const Vector s_se = cov.stacked_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  const Vector k_se = cov.kron_cov.diagonal().cwiseMax(0.0).cwiseSqrt();
  ci.stacked_lower = stacked_est - z * s_se;
  ci.stacked_upper = stacked_est + z * s_se;
  ci.kron_lower = kron_est - z * k_se;
  ci.kron_upper = kron_est + z * k_se;
  return ci;
}

ConfidenceIntervals confidence_intervals(const MarFit& fit, const AsymptoticCovariance& cov,
                                         double level) {
  return confidence_intervals(stacked_estimate(fit), kron_estimate(fit), cov, level);
}

SpecTestResult specification_test(const MatrixSeries& series) {
  series.validate();
  const int m = series.m, n = series.n;
  if (m < 2 || n < 2)
    throw PreconditionError("specification_test: needs m >= 2 and n >= 2, the Kronecker "
                            "structure is vacuous otherwise");
  const int T = series.T();
  const Var1Fit v = fit_var1(series);
  const Matrix g = rearrange(v.phi, m, n);
  const KronTermList nkp = nkp_project(v.phi, m, n, 1);
  const Vector alpha = vec(nkp.terms[0].a);
  const Vector bvec = vec(nkp.terms[0].b);
  const double s1 = bvec.norm();
  if (!(s1 > 0.0)) throw NumericError("specification_test: leading factor is zero");
  const Vector beta1 = bvec / s1;

  SpecTestResult out;
  out.d_hat = g - alpha * bvec.transpose();
  const Eigen::Index m2 = static_cast<Eigen::Index>(m) * m;
  const Eigen::Index n2 = static_cast<Eigen::Index>(n) * n;
  out.p_hat = kron(Matrix(Matrix::Identity(n2, n2) - beta1 * beta1.transpose()),
                   Matrix(Matrix::Identity(m2, m2) - alpha * alpha.transpose()));
  out.df = (m * m - 1) * (n * n - 1);

  const Matrix xi1 = xi1_matrix(v.gamma0, v.sigma, m, n);
  const Matrix mid = out.p_hat * xi1 * out.p_hat;
  const Matrix minv = pinv_fixed_rank_psd(mid, out.df);
  const Vector d = vec(out.d_hat);
  out.statistic = T * d.dot(minv * d);
  out.p_value = chi2_tail(out.statistic, out.df);

  // Flag when the projected covariance's numerical rank disagrees with the
  // degrees of freedom the pseudoinverse was pinned to.
  Eigen::SelfAdjointEigenSolver<Matrix> es(mid, Eigen::EigenvaluesOnly);
  const Vector w = es.eigenvalues();
  const double tol = static_cast<double>(mid.rows()) *
                     std::numeric_limits<double>::epsilon() * w.cwiseAbs().maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > tol) ++rank;
  out.rank_warning = rank != out.df;
  return out;
}

double chi2_tail(double x, double df) {
  if (df <= 0.0) throw PreconditionError("chi2_tail: df must be positive");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw PreconditionError("normal_quantile: p must be in (0, 1)");
  static const boost::math::normal_distribution<double> nd(0.0, 1.0);
  return boost::math::quantile(nd, p);
}

}  // namespace markit
