#include "markit/model.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <random>
#include <string>

#include "markit/kron.hpp"

namespace markit {

MatrixSeries MatrixSeries::create(int m, int n, int T) {
  if (m < 1 || n < 1 || T < 0) throw DimensionError("MatrixSeries: m, n must be >= 1 and T >= 0");
  MatrixSeries s;
  s.m = m;
  s.n = n;
  s.x.assign(static_cast<size_t>(T), Matrix::Zero(m, n));
  s.row_labels.resize(m);
  s.col_labels.resize(n);
  for (int i = 0; i < m; ++i) s.row_labels[i] = "r" + std::to_string(i + 1);
  for (int j = 0; j < n; ++j) s.col_labels[j] = "c" + std::to_string(j + 1);
  return s;
}

MatrixSeries MatrixSeries::head(int count) const {
  if (count < 0 || count > T())
    throw PreconditionError("MatrixSeries::head: count out of range");
  MatrixSeries s = *this;
  s.x.resize(static_cast<size_t>(count));
  return s;
}

MatrixSeries MatrixSeries::transposed() const {
  MatrixSeries s;
  s.m = n;
  s.n = m;
  s.row_labels = col_labels;
  s.col_labels = row_labels;
  s.x.reserve(x.size());
  for (const Matrix& xt : x) s.x.push_back(xt.transpose());
  return s;
}

void MatrixSeries::validate() const {
  if (m < 1 || n < 1) throw DimensionError("MatrixSeries: empty dimensions");
  if (row_labels.size() != static_cast<size_t>(m) ||
      col_labels.size() != static_cast<size_t>(n))
    throw DimensionError("MatrixSeries: label counts do not match dimensions");
  for (const Matrix& xt : x) {
    if (xt.rows() != m || xt.cols() != n)
      throw DimensionError("MatrixSeries: observation shape mismatch");
    require_finite(xt, "MatrixSeries observation");
  }
}

static void check_symmetric(const Matrix& s, const char* what) {
  if (s.rows() != s.cols())
    throw DimensionError(std::string(what) + " must be square");
  const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
  if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw PreconditionError(std::string(what) + " must be symmetric");
}

CovarianceSpec CovarianceSpec::identity() { return CovarianceSpec{}; }

CovarianceSpec CovarianceSpec::diagonal(Vector v) {
  if (v.size() == 0) throw DimensionError("diagonal covariance: empty variance vector");
  if ((v.array() <= 0.0).any())
    throw PreconditionError("diagonal covariance: variances must be positive");
  CovarianceSpec c;
  c.kind = Kind::Diagonal;
  c.variances = std::move(v);
  return c;
}

CovarianceSpec CovarianceSpec::full(Matrix s) {
  require_finite(s, "full covariance");
  check_symmetric(s, "full covariance");
  CovarianceSpec c;
  c.kind = Kind::Full;
  c.sigma = std::move(s);
  return c;
}

CovarianceSpec CovarianceSpec::kronecker(Matrix sc, Matrix sr) {
  require_finite(sc, "sigma_c");
  require_finite(sr, "sigma_r");
  check_symmetric(sc, "sigma_c");
  check_symmetric(sr, "sigma_r");
  const double nr = sr.norm();
  if (nr <= 0.0) throw PreconditionError("sigma_r must be nonzero");
  CovarianceSpec c;
  c.kind = Kind::Kronecker;
  c.sigma_r = sr / nr;
  c.sigma_c = sc * nr;
  return c;
}

void CovarianceSpec::check_dims(int m, int n) const {
  const Eigen::Index mn = static_cast<Eigen::Index>(m) * n;
  switch (kind) {
    case Kind::Identity: return;
    case Kind::Diagonal:
      if (variances.size() != mn)
        throw DimensionError("diagonal covariance length does not match m*n");
      return;
    case Kind::Full:
      if (sigma.rows() != mn)
        throw DimensionError("full covariance side does not match m*n");
      return;
    case Kind::Kronecker:
      if (sigma_c.rows() != n || sigma_r.rows() != m)
        throw DimensionError("Kronecker covariance factor dimensions do not match (m, n)");
      return;
  }
}

Matrix CovarianceSpec::dense(int m, int n) const {
  check_dims(m, n);
  const Eigen::Index mn = static_cast<Eigen::Index>(m) * n;
  switch (kind) {
    case Kind::Identity: return Matrix::Identity(mn, mn);
    case Kind::Diagonal: return variances.asDiagonal();
    case Kind::Full: return sigma;
    case Kind::Kronecker: return kron(sigma_c, sigma_r);
  }
  return Matrix::Identity(mn, mn);
}

bool CovarianceSpec::spd(int m, int n) const {
  const Matrix s = dense(m, n);
  return Eigen::LLT<Matrix>(s).info() == Eigen::Success;
}

MarModel::MarModel(Matrix a_, Matrix b_, CovarianceSpec cov_)
    : a(std::move(a_)), b(std::move(b_)), cov(std::move(cov_)) {
  if (a.rows() != a.cols() || b.rows() != b.cols())
    throw DimensionError("MarModel: A and B must be square");
  if (a.size() == 0 || b.size() == 0) throw DimensionError("MarModel: empty coefficient matrix");
  require_finite(a, "A");
  require_finite(b, "B");
  cov.check_dims(m(), n());
}

StationarityCheck is_stationary(const MarModel& model) {
  StationarityCheck out;
  out.rho_product = spectral_radius(model.a) * spectral_radius(model.b);
  out.stationary = out.rho_product < 1.0;
  return out;
}

namespace {

// Per-kind innovation sampler; draws are column-major within each step.
struct NoiseSampler {
  int m, n;
  CovarianceSpec::Kind kind;
  Vector scale;   // Diagonal: per-entry standard deviations
  Matrix chol;    // Full: lower Cholesky factor of Sigma
  Matrix chol_r;  // Kronecker
  Matrix chol_c;

  NoiseSampler(const MarModel& model) : m(model.m()), n(model.n()), kind(model.cov.kind) {
    const CovarianceSpec& c = model.cov;
    c.check_dims(m, n);
    switch (kind) {
      case CovarianceSpec::Kind::Identity: break;
      case CovarianceSpec::Kind::Diagonal:
        scale = c.variances.array().sqrt().matrix();
        break;
      case CovarianceSpec::Kind::Full: {
        Eigen::LLT<Matrix> llt(c.sigma);
        if (llt.info() != Eigen::Success)
          throw NumericError("simulate: full covariance is not positive definite");
        chol = llt.matrixL();
        break;
      }
      case CovarianceSpec::Kind::Kronecker: {
        Eigen::LLT<Matrix> lr(c.sigma_r), lc(c.sigma_c);
        if (lr.info() != Eigen::Success || lc.info() != Eigen::Success)
          throw NumericError("simulate: Kronecker covariance factor is not positive definite");
        chol_r = lr.matrixL();
        chol_c = lc.matrixL();
        break;
      }
    }
  }

  Matrix draw(std::mt19937_64& gen, std::normal_distribution<double>& nd) const {
    Matrix z(m, n);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < m; ++i) z(i, j) = nd(gen);
    switch (kind) {
      case CovarianceSpec::Kind::Identity: return z;
      case CovarianceSpec::Kind::Diagonal: {
        Vector e = scale.cwiseProduct(vec(z));
        return unvec(e, m, n);
      }
      case CovarianceSpec::Kind::Full: {
        Vector e = chol * vec(z);
        return unvec(e, m, n);
      }
      case CovarianceSpec::Kind::Kronecker: return chol_r * z * chol_c.transpose();
    }
    return z;
  }
};

}  // namespace

MatrixSeries simulate(const MarModel& model, int T, std::uint64_t seed, int burn_in) {
  if (T < 1) throw PreconditionError("simulate: T must be >= 1");
  if (burn_in < 0) throw PreconditionError("simulate: burn_in must be >= 0");
  const StationarityCheck sc = is_stationary(model);
  if (!sc.stationary)
    throw PreconditionError("simulate: model is not stationary (rho(A)*rho(B) = " +
                            std::to_string(sc.rho_product) + " >= 1)");
  NoiseSampler sampler(model);
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);

  MatrixSeries out = MatrixSeries::create(model.m(), model.n(), T);
  Matrix x = Matrix::Zero(model.m(), model.n());
  const Matrix bt = model.b.transpose();
  for (int step = 0; step < burn_in + T; ++step) {
    x = model.a * x * bt + sampler.draw(gen, nd);
    if (step >= burn_in) out.x[static_cast<size_t>(step - burn_in)] = x;
  }
  return out;
}

Matrix autocovariance(const MarModel& model, int k, double rel_tol, int max_terms) {
  if (k < 0) throw PreconditionError("autocovariance: k must be >= 0");
  if (rel_tol <= 0.0) throw PreconditionError("autocovariance: tol must be > 0");
  const StationarityCheck sc = is_stationary(model);
  if (!sc.stationary)
    throw PreconditionError("autocovariance: model is not stationary (rho product = " +
                            std::to_string(sc.rho_product) + ")");
  const Matrix phi = kron(model.b, model.a);
  const Matrix sig = model.cov.dense(model.m(), model.n());
  Matrix phik = Matrix::Identity(phi.rows(), phi.cols());
  for (int i = 0; i < k; ++i) phik = phi * phik;

  // term_l = Phi^{k+l} Sigma (Phi^l)^T evolves by term <- Phi term Phi^T
  Matrix term = phik * sig;
  Matrix sum = term;
  for (int l = 1; l <= max_terms; ++l) {
    term = phi * term * phi.transpose();
    sum += term;
    if (term.norm() < rel_tol * sum.norm()) {
      if (k == 0) sum = ((sum + sum.transpose()) * 0.5).eval();
      return sum;
    }
  }
  throw NumericError("autocovariance: series did not converge within " +
                     std::to_string(max_terms) + " terms");
}

IrfResult irf_s1(const MarModel& model, int i, int j, int horizon) {
  const int m = model.m(), n = model.n();
  if (i < 1 || i > m || j < 1 || j > n)
    throw PreconditionError("irf_s1: shock index (" + std::to_string(i) + "," +
                            std::to_string(j) + ") out of range for " + std::to_string(m) + "x" +
                            std::to_string(n));
  if (horizon < 0) throw PreconditionError("irf_s1: horizon must be >= 0");
  const StationarityCheck sc = is_stationary(model);
  if (!sc.stationary) throw PreconditionError("irf_s1: model is not stationary");

  const Matrix sig = model.cov.dense(m, n);
  const Eigen::Index s = static_cast<Eigen::Index>(j - 1) * m + (i - 1);
  const double sigma_ss = sig(s, s);
  if (sigma_ss <= 0.0) throw NumericError("irf_s1: shock entry has nonpositive variance");
  const Matrix phi = kron(model.b, model.a);

  IrfResult out;
  out.shock_row = i;
  out.shock_col = j;
  Vector cur = sig.col(s) / std::sqrt(sigma_ss);
  Vector acc = Vector::Zero(cur.size());
  out.responses.reserve(horizon + 1);
  out.accumulated.reserve(horizon + 1);
  for (int kk = 0; kk <= horizon; ++kk) {
    acc += cur;
    out.responses.push_back(unvec(cur, m, n));
    out.accumulated.push_back(unvec(acc, m, n));
    if (kk < horizon) cur = phi * cur;
  }

  if (model.cov.kind == CovarianceSpec::Kind::Kronecker) {
    out.factored = true;
    // full scale on the row response; the column response keeps Sigma_c's column
    Vector fr = model.cov.sigma_r.col(i - 1) / std::sqrt(sigma_ss);
    Vector fc = model.cov.sigma_c.col(j - 1);
    out.row_resp.reserve(horizon + 1);
    out.col_resp.reserve(horizon + 1);
    for (int kk = 0; kk <= horizon; ++kk) {
      out.row_resp.push_back(fr);
      out.col_resp.push_back(fc);
      if (kk < horizon) {
        fr = model.a * fr;
        fc = model.b * fc;
      }
    }
  }
  return out;
}

MarModel random_model(int m, int n, double rho_target, std::uint64_t seed) {
  if (m < 1 || n < 1) throw DimensionError("random_model: m and n must be >= 1");
  if (rho_target <= 0.0 || rho_target >= 1.0)
    throw PreconditionError("random_model: rho_target must be in (0, 1)");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix a(m, m), b(n, n);
    for (Eigen::Index j = 0; j < m; ++j)
      for (Eigen::Index i = 0; i < m; ++i) a(i, j) = nd(gen);
    for (Eigen::Index j = 0; j < n; ++j)
      for (Eigen::Index i = 0; i < n; ++i) b(i, j) = nd(gen);
    const double ra = spectral_radius(a), rb = spectral_radius(b);
    if (ra <= 0.0 || rb <= 0.0) continue;  // next substream
    b *= rho_target / (ra * rb);
    const double na = a.norm();
    a /= na;
    b *= na;
    fix_sign(a, b);
    return MarModel(std::move(a), std::move(b), CovarianceSpec::identity());
  }
  throw NumericError("random_model: could not draw a model with nonzero spectral radii");
}

namespace {

// Haar-distributed orthonormal matrix: QR of a Gaussian matrix with the
// R diagonal's signs folded into Q.
Matrix haar_orthonormal(int d, std::mt19937_64& gen, std::normal_distribution<double>& nd) {
  Matrix z(d, d);
  for (Eigen::Index j = 0; j < d; ++j)
    for (Eigen::Index i = 0; i < d; ++i) z(i, j) = nd(gen);
  Eigen::HouseholderQR<Matrix> qr(z);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j)
    if (r(j, j) < 0) q.col(j) = -q.col(j);
  return q;
}

Matrix random_spd(int d, std::mt19937_64& gen, std::normal_distribution<double>& nd) {
  const Matrix q = haar_orthonormal(d, gen, nd);
  Vector lam(d);
  for (Eigen::Index i = 0; i < d; ++i) lam(i) = std::abs(nd(gen));
  Matrix s = q * lam.asDiagonal() * q.transpose();
  return ((s + s.transpose()) * 0.5).eval();
}

}  // namespace

CovarianceSpec random_covariance(int setting, int m, int n, std::uint64_t seed) {
  if (m < 1 || n < 1) throw DimensionError("random_covariance: m and n must be >= 1");
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  switch (setting) {
    case 1: return CovarianceSpec::identity();
    case 2: return CovarianceSpec::full(random_spd(m * n, gen, nd));
    case 3: {
      Matrix sc = random_spd(n, gen, nd);
      Matrix sr = random_spd(m, gen, nd);
      return CovarianceSpec::kronecker(std::move(sc), std::move(sr));
    }
    default:
      throw PreconditionError("random_covariance: setting must be 1, 2, or 3, got " +
                              std::to_string(setting));
  }
}

}  // namespace markit
