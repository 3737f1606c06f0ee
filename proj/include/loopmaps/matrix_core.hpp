#pragma once

#include <complex>

#include <Eigen/Dense>

#include "loopmaps/errors.hpp"

namespace loopmaps {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

inline constexpr double kDefaultConditionCap = 1e12;

bool is_unitary(const ComplexMatrix& a, double tol);
bool is_hermitian(const ComplexMatrix& a, double tol);
/// P^2 = P = P^* up to `tol` (Frobenius residuals).
bool is_projection(const ComplexMatrix& a, double tol);

/// 2-norm condition number; infinity for singular input.
double condition_number(const ComplexMatrix& a);

struct UnitaryTriangular {
  ComplexMatrix unitary;
  ComplexMatrix upper;  ///< upper triangular, strictly positive real diagonal
};

/// A = U B with U unitary and B upper triangular with positive diagonal.
/// This is the finite-dimensional Iwasawa splitting GL(n,C) = U(n) B.
/// Throws FactorizationError when cond(A) exceeds `condition_cap`.
UnitaryTriangular qr_unitary_positive(const ComplexMatrix& a,
                                      double condition_cap = kDefaultConditionCap);

/// Hermitian projection onto the column span of a full-rank n x k frame.
ComplexMatrix hermitian_projection(const ComplexMatrix& frame, double rank_tol = 1e-10);

struct ImageFrame {
  int rank = 0;
  ComplexMatrix frame;                ///< n x rank, orthonormal columns
  Eigen::VectorXd singular_values;    ///< all of them, descending
};

/// Numerical image: left singular vectors of the singular values above
/// rank_tol * sigma_max. The zero matrix has rank 0 and an empty frame.
ImageFrame svd_image(const ComplexMatrix& a, double rank_tol);

/// Orthonormal frame of the numerical kernel (complement of the row space).
ComplexMatrix kernel_frame(const ComplexMatrix& a, double rank_tol);

/// exp(A) by scaling and squaring with Pade approximants.
ComplexMatrix matrix_exp(const ComplexMatrix& a);

/// Orthonormal basis of the orthogonal complement of span(frame) inside the
/// span of `ambient` (both with orthonormal columns).
ComplexMatrix complement_in(const ComplexMatrix& frame, const ComplexMatrix& ambient,
                            double rank_tol = 1e-10);

inline ComplexMatrix identity(int n) { return ComplexMatrix::Identity(n, n); }

/// pi - pi^perp for a Hermitian projection.
inline ComplexMatrix reflection(const ComplexMatrix& projection) {
  return 2.0 * projection - identity(static_cast<int>(projection.rows()));
}

}  // namespace loopmaps
