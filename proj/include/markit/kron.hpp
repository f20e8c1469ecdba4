#pragma once

#include <vector>

#include "markit/types.hpp"

namespace markit {

// Kronecker product of two dense matrices.
Matrix kron(const Matrix& c, const Matrix& d);

// Column-major vectorization and its inverse.
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols);

// Rearrangement operator: maps an (mn x mn) matrix to an (m^2 x n^2) matrix
// such that rearrange(kron(B, A), m, n) == vec(A) * vec(B)^T.
Matrix rearrange(const Matrix& phi, int m, int n);

// 0-based permutation pi with vec(rearrange(Phi))[k] == vec(Phi)[pi[k]].
std::vector<Eigen::Index> rearrange_permutation(int m, int n);

// Largest eigenvalue modulus.
double spectral_radius(const Matrix& m);

struct KronTerm {
  Matrix a;  // m x m, unit Frobenius norm, sign-fixed
  Matrix b;  // n x n, carries the scale
};

struct KronTermList {
  std::vector<KronTerm> terms;
  Vector singular_values;  // full spectrum of the rearranged matrix, nonincreasing
};

// Nearest Kronecker product: best rank-k approximation of rearrange(phi)
// via SVD; term i reshapes the i-th singular pair.
KronTermList nkp_project(const Matrix& phi, int m, int n, int k = 1);

// Moore-Penrose pseudoinverse. tol < 0 selects the default cutoff
// eps * max(rows, cols) * sigma_max.
Matrix pinv(const Matrix& m, double tol = -1.0);

// Pseudoinverse of a symmetric PSD matrix keeping exactly `rank` largest
// eigenvalues. Throws NumericError if any retained eigenvalue is <= 0.
Matrix pinv_fixed_rank_psd(const Matrix& m, int rank);

// Sign convention: flip (a, b) jointly so the entry of `a` with largest
// absolute value is strictly positive; ties broken by lowest vec index.
void fix_sign(Matrix& a, Matrix& b);

}  // namespace markit
