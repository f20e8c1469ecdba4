#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "markit/types.hpp"

namespace markit {

struct MatrixSeries {
  int m = 0;
  int n = 0;
  std::vector<Matrix> x;  // T matrices, each m x n
  std::vector<std::string> row_labels;  // size m
  std::vector<std::string> col_labels;  // size n

  int T() const { return static_cast<int>(x.size()); }

  static MatrixSeries create(int m, int n, int T);
  // First `count` observations, labels kept.
  MatrixSeries head(int count) const;
  // Entrywise transpose of every observation (m and n swap).
  MatrixSeries transposed() const;
  void validate() const;
};

struct CovarianceSpec {
  enum class Kind { Identity, Diagonal, Full, Kronecker };

  Kind kind = Kind::Identity;
  Vector variances;  // Diagonal: mn positive entries
  Matrix sigma;      // Full: mn x mn symmetric
  Matrix sigma_c;    // Kronecker: n x n
  Matrix sigma_r;    // Kronecker: m x m, stored with unit Frobenius norm

  static CovarianceSpec identity();
  static CovarianceSpec diagonal(Vector v);
  static CovarianceSpec full(Matrix s);
  // Normalizes sigma_r to unit Frobenius norm, sigma_c absorbs the factor.
  static CovarianceSpec kronecker(Matrix sc, Matrix sr);

  // Dense mn x mn covariance for an m x n model.
  Matrix dense(int m, int n) const;
  // True when dense(m, n) admits a Cholesky factorization.
  bool spd(int m, int n) const;
  void check_dims(int m, int n) const;
};

struct MarModel {
  Matrix a;  // m x m
  Matrix b;  // n x n
  CovarianceSpec cov;

  MarModel() = default;
  MarModel(Matrix a_, Matrix b_, CovarianceSpec cov_ = CovarianceSpec::identity());

  int m() const { return static_cast<int>(a.rows()); }
  int n() const { return static_cast<int>(b.rows()); }
};

// rho(A) * rho(B) together with the strict stationarity predicate.
struct StationarityCheck {
  bool stationary = false;
  double rho_product = 0.0;
};
StationarityCheck is_stationary(const MarModel& model);

// Iterates X_t = A X_{t-1} B^T + E_t from X_0 = 0 for burn_in + T steps and
// returns the last T. vec(E_t) ~ N(0, Sigma); deterministic given seed.
MatrixSeries simulate(const MarModel& model, int T, std::uint64_t seed, int burn_in = 500);

// Gamma_k = sum_{l>=0} (B^{k+l} x A^{k+l}) Sigma (B^l x A^l)^T, truncated when
// a term's Frobenius norm drops below rel_tol times the partial sum's norm.
Matrix autocovariance(const MarModel& model, int k, double rel_tol = 1e-12,
                      int max_terms = 10000);

struct IrfResult {
  int shock_row = 0;  // i, 1-based
  int shock_col = 0;  // j, 1-based
  std::vector<Matrix> responses;    // K+1 entries of m x n
  std::vector<Matrix> accumulated;  // K+1 running sums
  bool factored = false;            // present only for Kronecker covariance
  std::vector<Vector> row_resp;     // K+1 vectors of length m
  std::vector<Vector> col_resp;     // K+1 vectors of length n
};

// Impulse response to a one-standard-deviation shock in entry (i, j) with the
// remaining innovations orthogonalized against it.
IrfResult irf_s1(const MarModel& model, int i, int j, int horizon);

// A, B with iid N(0,1) entries, B rescaled so rho(A) rho(B) = rho_target,
// then A normalized to unit Frobenius norm with B absorbing the factor.
MarModel random_model(int m, int n, double rho_target, std::uint64_t seed);

// setting 1: identity; 2: full Q diag(|N(0,1)|) Q^T with Haar-random Q;
// 3: Kronecker with both factors generated as in setting 2.
CovarianceSpec random_covariance(int setting, int m, int n, std::uint64_t seed);

}  // namespace markit
