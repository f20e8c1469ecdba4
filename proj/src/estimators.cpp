#include "markit/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <cmath>
#include <string>
#include <utility>

#include "markit/kron.hpp"

namespace markit {

namespace {

Matrix solve_right(const Matrix& num, const Matrix& den, const char* what) {
  // num * den^{-1} with an explicit singularity check; den is a small
  // symmetric normal matrix in every call site.
  Eigen::FullPivLU<Matrix> lu(den);
  if (!lu.isInvertible())
    throw NumericError(std::string(what) + ": singular normal matrix, series too short or degenerate");
  return lu.solve(num.transpose()).transpose();
}

void require_fit_input(const MatrixSeries& s, int min_t) {
  s.validate();
  if (s.T() < min_t)
    throw PreconditionError("fit: need at least " + std::to_string(min_t) +
                            " observations, got " + std::to_string(s.T()));
}

MatrixSeries residual_series(const MatrixSeries& s, const Matrix& a, const Matrix& b) {
  MatrixSeries r;
  r.m = s.m;
  r.n = s.n;
  r.row_labels = s.row_labels;
  r.col_labels = s.col_labels;
  r.x.reserve(static_cast<size_t>(s.T() - 1));
  const Matrix bt = b.transpose();
  for (int t = 1; t < s.T(); ++t)
    r.x.push_back(s.x[static_cast<size_t>(t)] - a * s.x[static_cast<size_t>(t - 1)] * bt);
  return r;
}

Matrix residual_covariance(const MatrixSeries& resid) {
  const Eigen::Index mn = static_cast<Eigen::Index>(resid.m) * resid.n;
  Matrix sig = Matrix::Zero(mn, mn);
  for (const Matrix& rt : resid.x) {
    const Vector v = vec(rt);
    sig.noalias() += v * v.transpose();
  }
  sig /= static_cast<double>(resid.x.size());
  return sig;
}

void finalize_fit(MarFit& fit, const MatrixSeries& s, Matrix a, Matrix b, CovarianceSpec cov) {
  fit.residuals = residual_series(s, a, b);
  fit.sigma_resid = residual_covariance(fit.residuals);
  fit.model = MarModel(std::move(a), std::move(b), std::move(cov));
  fit.stationary = is_stationary(fit.model).stationary;
}

std::pair<Matrix, Matrix> initial_pair(const MatrixSeries& s, const FitOptions& opts) {
  switch (opts.init) {
    case FitOptions::Init::Identity:
      return {Matrix::Identity(s.m, s.m), Matrix::Identity(s.n, s.n)};
    case FitOptions::Init::Provided: {
      if (opts.a0.rows() != s.m || opts.a0.cols() != s.m || opts.b0.rows() != s.n ||
          opts.b0.cols() != s.n)
        throw DimensionError("fit: provided starting values have the wrong shape");
      require_finite(opts.a0, "a0");
      require_finite(opts.b0, "b0");
      return {opts.a0, opts.b0};
    }
    case FitOptions::Init::FromProjection: {
      if (s.T() >= s.m * s.n + 2) {
        const MarFit p = fit_proj(s);
        return {p.model.a, p.model.b};
      }
      // Projection needs a full-rank VAR(1) regression; short series start at identity.
      return {Matrix::Identity(s.m, s.m), Matrix::Identity(s.n, s.n)};
    }
  }
  return {Matrix::Identity(s.m, s.m), Matrix::Identity(s.n, s.n)};
}

bool objective_converged(double prev, double cur, double rel_tol) {
  return std::abs(cur - prev) <= rel_tol * (1.0 + std::abs(prev));
}

// SPD inverse with a one-shot diagonal ridge repair when the Cholesky
// factorization fails; each repair is applied to the stored matrix and counted.
Matrix spd_inverse(Matrix& s, int& ridge_events, const char* what) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) {
    s += 1e-10 * Matrix::Identity(s.rows(), s.cols());
    ++ridge_events;
    llt.compute(s);
    if (llt.info() != Eigen::Success)
      throw NumericError(std::string(what) + ": covariance is not positive definite");
  }
  return llt.solve(Matrix::Identity(s.rows(), s.cols()));
}

double log_det_spd(const Matrix& s, const char* what) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success)
    throw NumericError(std::string(what) + ": covariance is not positive definite");
  const Matrix l = llt.matrixL();
  return 2.0 * l.diagonal().array().log().sum();
}

double mle_nll(const MatrixSeries& s, const Matrix& a, const Matrix& b, const Matrix& sigma_c,
               const Matrix& sigma_r) {
  const int tm1 = s.T() - 1;
  const Matrix sci = Eigen::LLT<Matrix>(sigma_c).solve(Matrix::Identity(s.n, s.n));
  const Matrix sri = Eigen::LLT<Matrix>(sigma_r).solve(Matrix::Identity(s.m, s.m));
  double trace_sum = 0.0;
  const Matrix bt = b.transpose();
  for (int t = 1; t < s.T(); ++t) {
    const Matrix r = s.x[static_cast<size_t>(t)] - a * s.x[static_cast<size_t>(t - 1)] * bt;
    trace_sum += (sri * r * sci * r.transpose()).trace();
  }
  return s.m * tm1 * log_det_spd(sigma_c, "nll") + s.n * tm1 * log_det_spd(sigma_r, "nll") +
         trace_sum;
}

}  // namespace

Var1Fit fit_var1(const MatrixSeries& series) {
  const Eigen::Index mn = static_cast<Eigen::Index>(series.m) * series.n;
  series.validate();
  if (series.T() < static_cast<int>(mn) + 2)
    throw PreconditionError("fit_var1: design matrix is rank deficient, a " +
                            std::to_string(series.m) + "x" + std::to_string(series.n) +
                            " series needs at least " + std::to_string(mn + 2) +
                            " observations, got " + std::to_string(series.T()));
  const int T = series.T();

  Matrix sxx = Matrix::Zero(mn, mn);
  Matrix sxy = Matrix::Zero(mn, mn);
  for (int t = 1; t < T; ++t) {
    const Vector z = vec(series.x[static_cast<size_t>(t - 1)]);
    const Vector y = vec(series.x[static_cast<size_t>(t)]);
    sxx.noalias() += z * z.transpose();
    sxy.noalias() += y * z.transpose();
  }

  Var1Fit fit;
  fit.t_eff = T - 1;
  fit.phi = solve_right(sxy, sxx, "fit_var1");
  fit.gamma0 = sxx / static_cast<double>(T - 1);

  Matrix sig = Matrix::Zero(mn, mn);
  for (int t = 1; t < T; ++t) {
    const Vector r = vec(series.x[static_cast<size_t>(t)]) -
                     fit.phi * vec(series.x[static_cast<size_t>(t - 1)]);
    sig.noalias() += r * r.transpose();
  }
  fit.sigma = sig / static_cast<double>(T - 1);
  return fit;
}

void normalize_pair(Matrix& a, Matrix& b) {
  const double na = a.norm();
  if (!(na > 0.0)) throw NumericError("normalize_pair: A has zero norm");
  a /= na;
  b *= na;
  fix_sign(a, b);
}

MarFit fit_proj(const MatrixSeries& series) {
  const Var1Fit v = fit_var1(series);
  const KronTermList nkp = nkp_project(v.phi, series.m, series.n, 1);

  MarFit fit;
  fit.method = Method::Proj;
  fit.iterations = 0;
  fit.converged = true;
  Matrix a = nkp.terms[0].a;
  Matrix b = nkp.terms[0].b;
  fit.objective_trace.push_back(detail::lse_objective(series, a, b));
  finalize_fit(fit, series, std::move(a), std::move(b), CovarianceSpec::identity());
  fit.model.cov = CovarianceSpec::full(fit.sigma_resid);
  return fit;
}

MarFit fit_lse(const MatrixSeries& series, const FitOptions& opts) {
  require_fit_input(series, 3);
  if (opts.max_iter < 1) throw PreconditionError("fit_lse: max_iter must be >= 1");
  auto [a, b] = initial_pair(series, opts);

  MarFit fit;
  fit.method = Method::Lse;
  double prev = detail::lse_objective(series, a, b);
  fit.objective_trace.push_back(prev);
  for (int it = 1; it <= opts.max_iter; ++it) {
    a = detail::lse_update_a(series, b);
    b = detail::lse_update_b(series, a);
    const double cur = detail::lse_objective(series, a, b);
    fit.objective_trace.push_back(cur);
    fit.iterations = it;
    if (objective_converged(prev, cur, opts.rel_tol)) {
      fit.converged = true;
      break;
    }
    prev = cur;
  }
  normalize_pair(a, b);
  finalize_fit(fit, series, std::move(a), std::move(b), CovarianceSpec::identity());
  fit.model.cov = CovarianceSpec::full(fit.sigma_resid);
  return fit;
}

MarFit fit_mle(const MatrixSeries& series, const FitOptions& opts) {
  require_fit_input(series, 3);
  if (opts.max_iter < 1) throw PreconditionError("fit_mle: max_iter must be >= 1");
  if (series.m * (series.T() - 1) <= series.n || series.n * (series.T() - 1) <= series.m)
    throw PreconditionError("fit_mle: series too short for the covariance updates");
  auto [a, b] = initial_pair(series, opts);
  Matrix sigma_c = Matrix::Identity(series.n, series.n);
  Matrix sigma_r = Matrix::Identity(series.m, series.m);

  MarFit fit;
  fit.method = Method::Mle;
  double prev = mle_nll(series, a, b, sigma_c, sigma_r);
  fit.objective_trace.push_back(prev);
  for (int it = 1; it <= opts.max_iter; ++it) {
    a = detail::mle_update_a(series, b, sigma_c);
    b = detail::mle_update_b(series, a, sigma_r);
    sigma_c = detail::mle_update_sigma_c(series, a, b, sigma_r);
    (void)spd_inverse(sigma_c, fit.ridge_events, "fit_mle");
    sigma_r = detail::mle_update_sigma_r(series, a, b, sigma_c);
    (void)spd_inverse(sigma_r, fit.ridge_events, "fit_mle");

    // The likelihood is invariant under both rescalings.
    normalize_pair(a, b);
    const double ns = sigma_r.norm();
    sigma_r /= ns;
    sigma_c *= ns;

    const double cur = mle_nll(series, a, b, sigma_c, sigma_r);
    fit.objective_trace.push_back(cur);
    fit.iterations = it;
    if (objective_converged(prev, cur, opts.rel_tol)) {
      fit.converged = true;
      break;
    }
    prev = cur;
  }
  finalize_fit(fit, series, std::move(a), std::move(b),
               CovarianceSpec::kronecker(sigma_c, sigma_r));
  return fit;
}

namespace detail {

Matrix lse_update_a(const MatrixSeries& s, const Matrix& b) {
  Matrix num = Matrix::Zero(s.m, s.m);
  Matrix den = Matrix::Zero(s.m, s.m);
  const Matrix btb = b.transpose() * b;
  for (int t = 1; t < s.T(); ++t) {
    const Matrix& xp = s.x[static_cast<size_t>(t - 1)];
    num.noalias() += s.x[static_cast<size_t>(t)] * b * xp.transpose();
    den.noalias() += xp * btb * xp.transpose();
  }
  return solve_right(num, den, "lse_update_a");
}

Matrix lse_update_b(const MatrixSeries& s, const Matrix& a) {
  Matrix num = Matrix::Zero(s.n, s.n);
  Matrix den = Matrix::Zero(s.n, s.n);
  const Matrix ata = a.transpose() * a;
  for (int t = 1; t < s.T(); ++t) {
    const Matrix& xp = s.x[static_cast<size_t>(t - 1)];
    num.noalias() += s.x[static_cast<size_t>(t)].transpose() * a * xp;
    den.noalias() += xp.transpose() * ata * xp;
  }
  return solve_right(num, den, "lse_update_b");
}

Matrix mle_update_a(const MatrixSeries& s, const Matrix& b, const Matrix& sigma_c) {
  Eigen::LLT<Matrix> llt(sigma_c);
  if (llt.info() != Eigen::Success)
    throw NumericError("mle_update_a: sigma_c is not positive definite");
  const Matrix sci = llt.solve(Matrix::Identity(s.n, s.n));
  Matrix num = Matrix::Zero(s.m, s.m);
  Matrix den = Matrix::Zero(s.m, s.m);
  const Matrix scib = sci * b;
  const Matrix btscib = b.transpose() * scib;
  for (int t = 1; t < s.T(); ++t) {
    const Matrix& xp = s.x[static_cast<size_t>(t - 1)];
    num.noalias() += s.x[static_cast<size_t>(t)] * scib * xp.transpose();
    den.noalias() += xp * btscib * xp.transpose();
  }
  return solve_right(num, den, "mle_update_a");
}

Matrix mle_update_b(const MatrixSeries& s, const Matrix& a, const Matrix& sigma_r) {
  Eigen::LLT<Matrix> llt(sigma_r);
  if (llt.info() != Eigen::Success)
    throw NumericError("mle_update_b: sigma_r is not positive definite");
  const Matrix sri = llt.solve(Matrix::Identity(s.m, s.m));
  Matrix num = Matrix::Zero(s.n, s.n);
  Matrix den = Matrix::Zero(s.n, s.n);
  const Matrix sria = sri * a;
  const Matrix atsria = a.transpose() * sria;
  for (int t = 1; t < s.T(); ++t) {
    const Matrix& xp = s.x[static_cast<size_t>(t - 1)];
    num.noalias() += s.x[static_cast<size_t>(t)].transpose() * sria * xp;
    den.noalias() += xp.transpose() * atsria * xp;
  }
  return solve_right(num, den, "mle_update_b");
}

Matrix mle_update_sigma_c(const MatrixSeries& s, const Matrix& a, const Matrix& b,
                          const Matrix& sigma_r) {
  Eigen::LLT<Matrix> llt(sigma_r);
  if (llt.info() != Eigen::Success)
    throw NumericError("mle_update_sigma_c: sigma_r is not positive definite");
  const Matrix sri = llt.solve(Matrix::Identity(s.m, s.m));
  Matrix sum = Matrix::Zero(s.n, s.n);
  const Matrix bt = b.transpose();
  for (int t = 1; t < s.T(); ++t) {
    const Matrix r = s.x[static_cast<size_t>(t)] - a * s.x[static_cast<size_t>(t - 1)] * bt;
    sum.noalias() += r.transpose() * sri * r;
  }
  return sum / static_cast<double>(s.m * (s.T() - 1));
}

Matrix mle_update_sigma_r(const MatrixSeries& s, const Matrix& a, const Matrix& b,
                          const Matrix& sigma_c) {
  Eigen::LLT<Matrix> llt(sigma_c);
  if (llt.info() != Eigen::Success)
    throw NumericError("mle_update_sigma_r: sigma_c is not positive definite");
  const Matrix sci = llt.solve(Matrix::Identity(s.n, s.n));
  Matrix sum = Matrix::Zero(s.m, s.m);
  const Matrix bt = b.transpose();
  for (int t = 1; t < s.T(); ++t) {
    const Matrix r = s.x[static_cast<size_t>(t)] - a * s.x[static_cast<size_t>(t - 1)] * bt;
    sum.noalias() += r * sci * r.transpose();
  }
  return sum / static_cast<double>(s.n * (s.T() - 1));
}

double lse_objective(const MatrixSeries& s, const Matrix& a, const Matrix& b) {
  double obj = 0.0;
  const Matrix bt = b.transpose();
  for (int t = 1; t < s.T(); ++t)
    obj += (s.x[static_cast<size_t>(t)] - a * s.x[static_cast<size_t>(t - 1)] * bt).squaredNorm();
  return obj;
}

}  // namespace detail

}  // namespace markit
