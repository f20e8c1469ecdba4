#include "markit/kron.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>

#include <cmath>
#include <limits>
#include <string>

namespace markit {

Matrix kron(const Matrix& c, const Matrix& d) {
  return Eigen::kroneckerProduct(c, d).eval();
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (v.size() != rows * cols)
    throw DimensionError("unvec: vector length " + std::to_string(v.size()) +
                         " does not equal " + std::to_string(rows) + "x" + std::to_string(cols));
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

static void check_rearrange_dims(const Matrix& phi, int m, int n) {
  if (m < 1 || n < 1) throw DimensionError("rearrange: m and n must be positive");
  const Eigen::Index mn = static_cast<Eigen::Index>(m) * n;
  if (phi.rows() != mn || phi.cols() != mn)
    throw DimensionError("rearrange: expected a square matrix of side " + std::to_string(mn) +
                         ", got " + std::to_string(phi.rows()) + "x" + std::to_string(phi.cols()));
}

Matrix rearrange(const Matrix& phi, int m, int n) {
  check_rearrange_dims(phi, m, n);
  Matrix g(static_cast<Eigen::Index>(m) * m, static_cast<Eigen::Index>(n) * n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i)
          g(j * m + i, c * n + r) = phi(r * m + i, c * m + j);
  return g;
}

std::vector<Eigen::Index> rearrange_permutation(int m, int n) {
  if (m < 1 || n < 1) throw DimensionError("rearrange_permutation: m and n must be positive");
  const Eigen::Index m2 = static_cast<Eigen::Index>(m) * m;
  const Eigen::Index mn = static_cast<Eigen::Index>(m) * n;
  std::vector<Eigen::Index> pi(m2 * n * n);
  for (int c = 0; c < n; ++c)
    for (int r = 0; r < n; ++r)
      for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) {
          const Eigen::Index k = (c * n + r) * m2 + (j * m + i);
          pi[k] = (c * m + j) * mn + (r * m + i);
        }
  return pi;
}

double spectral_radius(const Matrix& m) {
  if (m.rows() != m.cols())
    throw DimensionError("spectral_radius: matrix must be square, got " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  if (m.size() == 0) return 0.0;
  Eigen::EigenSolver<Matrix> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw NumericError("spectral_radius: eigen solver failed");
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

void fix_sign(Matrix& a, Matrix& b) {
  const double* data = a.data();
  Eigen::Index best = 0;
  double best_abs = std::abs(data[0]);
  for (Eigen::Index k = 1; k < a.size(); ++k) {
    const double v = std::abs(data[k]);
    if (v > best_abs) {
      best_abs = v;
      best = k;
    }
  }
  if (data[best] < 0) {
    a = -a;
    b = -b;
  }
}

KronTermList nkp_project(const Matrix& phi, int m, int n, int k) {
  check_rearrange_dims(phi, m, n);
  const int kmax = std::min(m * m, n * n);
  if (k < 1 || k > kmax)
    throw PreconditionError("nkp_project: k must be in [1, " + std::to_string(kmax) + "], got " +
                            std::to_string(k));
  const Matrix g = rearrange(phi, m, n);
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("nkp_project: SVD failed");

  KronTermList out;
  out.singular_values = svd.singularValues();
  out.terms.reserve(k);
  for (int i = 0; i < k; ++i) {
    Matrix a = unvec(svd.matrixU().col(i), m, m);
    Matrix b = unvec(svd.singularValues()(i) * svd.matrixV().col(i), n, n);
    fix_sign(a, b);
    out.terms.push_back({std::move(a), std::move(b)});
  }
  return out;
}

Matrix pinv(const Matrix& m, double tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericError("pinv: SVD failed");
  const Vector& s = svd.singularValues();
  if (s.size() == 0) return Matrix::Zero(m.cols(), m.rows());
  const double cutoff =
      tol >= 0 ? tol
               : std::numeric_limits<double>::epsilon() *
                     static_cast<double>(std::max(m.rows(), m.cols())) * s(0);
  Vector sinv = Vector::Zero(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) sinv(i) = 1.0 / s(i);
  return svd.matrixV() * sinv.asDiagonal() * svd.matrixU().transpose();
}

Matrix pinv_fixed_rank_psd(const Matrix& m, int rank) {
  if (m.rows() != m.cols()) throw DimensionError("pinv_fixed_rank_psd: matrix must be square");
  if (rank < 0 || rank > m.rows())
    throw PreconditionError("pinv_fixed_rank_psd: rank out of range");
  Eigen::SelfAdjointEigenSolver<Matrix> es(m);
  if (es.info() != Eigen::Success)
    throw NumericError("pinv_fixed_rank_psd: eigen decomposition failed");
  // eigenvalues are ascending; keep the `rank` largest
  const Vector& w = es.eigenvalues();
  const Matrix& v = es.eigenvectors();
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  for (int i = 0; i < rank; ++i) {
    const Eigen::Index idx = m.rows() - 1 - i;
    if (w(idx) <= 0.0)
      throw NumericError("pinv_fixed_rank_psd: retained eigenvalue " + std::to_string(i + 1) +
                         " is not positive");
    out += v.col(idx) * (1.0 / w(idx)) * v.col(idx).transpose();
  }
  return out;
}

}  // namespace markit
