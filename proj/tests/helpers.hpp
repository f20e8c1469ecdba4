#pragma once

#include <random>
#include <vector>

#include "markit/model.hpp"
#include "markit/types.hpp"

#ifndef MARKIT_TEST_DATA_DIR
#define MARKIT_TEST_DATA_DIR "tests/data"
#endif

namespace testutil {

inline markit::Matrix mat2(double a11, double a12, double a21, double a22) {
  markit::Matrix m(2, 2);
  m << a11, a12, a21, a22;
  return m;
}

// The shared hand-written 2x2, T=6 dataset used by several frozen cases.
inline markit::MatrixSeries fixed_series6() {
  markit::MatrixSeries s = markit::MatrixSeries::create(2, 2, 6);
  s.x[0] = mat2(1.0, 0.5, -0.3, 0.8);
  s.x[1] = mat2(0.7, -0.2, 0.4, 0.1);
  s.x[2] = mat2(-0.1, 0.3, 0.2, -0.5);
  s.x[3] = mat2(0.6, 0.1, -0.4, 0.2);
  s.x[4] = mat2(0.2, -0.3, 0.5, 0.4);
  s.x[5] = mat2(-0.2, 0.6, 0.1, -0.1);
  return s;
}

inline markit::MatrixSeries head_series(const markit::MatrixSeries& s, int T) {
  return s.head(T);
}

inline markit::Matrix random_matrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  markit::Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = gauss(rng);
  return m;
}

inline double max_abs_diff(const markit::Matrix& a, const markit::Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace testutil
