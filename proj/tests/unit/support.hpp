#pragma once

#include <random>

#include "loopmaps/loop_algebra.hpp"

namespace testsupport {

using loopmaps::Complex;
using loopmaps::ComplexMatrix;

inline ComplexMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  ComplexMatrix m(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) m(i, j) = Complex(g(rng), g(rng));
  return m;
}

inline ComplexMatrix random_unitary(std::mt19937_64& rng, int n) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

inline ComplexMatrix random_projection(std::mt19937_64& rng, int n, int k) {
  const ComplexMatrix u = random_unitary(rng, n);
  return u.leftCols(k) * u.leftCols(k).adjoint();
}

inline ComplexMatrix e(int n, int i, int j) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(i, j) = 1.0;
  return m;
}

}  // namespace testsupport
