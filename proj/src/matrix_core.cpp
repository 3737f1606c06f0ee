#include "loopmaps/matrix_core.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "text.hpp"

#include <unsupported/Eigen/MatrixFunctions>

namespace loopmaps {

bool is_unitary(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a.adjoint() * a - identity(static_cast<int>(a.rows()))).norm() <= tol;
}

bool is_hermitian(const ComplexMatrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  return (a - a.adjoint()).norm() <= tol;
}

bool is_projection(const ComplexMatrix& a, double tol) {
  return is_hermitian(a, tol) && (a * a - a).norm() <= tol;
}

double condition_number(const ComplexMatrix& a) {
  if (a.size() == 0) return 1.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  const auto& s = svd.singularValues();
  const double smin = s(s.size() - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

UnitaryTriangular qr_unitary_positive(const ComplexMatrix& a, double condition_cap) {
  if (a.rows() != a.cols()) {
    throw SizeMismatch("qr_unitary_positive: matrix must be square");
  }
  const double cond = condition_number(a);
  if (!(cond <= condition_cap)) {
    throw FactorizationError("qr_unitary_positive: condition number " +
                             text::sci(cond) + " exceeds cap " +
                             text::sci(condition_cap));
  }
  const int n = static_cast<int>(a.rows());
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ() * identity(n);
  ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Rotate each column of Q so that diag(R) becomes real positive.
  for (int i = 0; i < n; ++i) {
    const Complex d = r(i, i);
    const Complex phase = d / std::abs(d);
    q.col(i) *= phase;
    r.row(i) *= std::conj(phase);
    r(i, i) = std::abs(d);
  }
  return {std::move(q), std::move(r)};
}

ComplexMatrix hermitian_projection(const ComplexMatrix& frame, double rank_tol) {
  const int n = static_cast<int>(frame.rows());
  const int k = static_cast<int>(frame.cols());
  if (k == 0) return ComplexMatrix::Zero(n, n);
  if (k > n) {
    throw RankError("hermitian_projection: " + std::to_string(k) +
                    " columns cannot be independent in dimension " + std::to_string(n));
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(frame, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  if (!(s(k - 1) > rank_tol * s(0))) {
    throw RankError("hermitian_projection: frame with " + std::to_string(k) +
                    " columns is numerically rank deficient");
  }
  const ComplexMatrix u = svd.matrixU();
  return u * u.adjoint();
}

ImageFrame svd_image(const ComplexMatrix& a, double rank_tol) {
  ImageFrame out;
  const int n = static_cast<int>(a.rows());
  if (a.size() == 0) {
    out.frame = ComplexMatrix::Zero(n, 0);
    return out;
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU);
  out.singular_values = svd.singularValues();
  const double smax = out.singular_values(0);
  int rank = 0;
  if (smax > 0.0) {
    for (int i = 0; i < out.singular_values.size(); ++i) {
      if (out.singular_values(i) > rank_tol * smax) ++rank;
    }
  }
  out.rank = rank;
  out.frame = svd.matrixU().leftCols(rank);
  return out;
}

ComplexMatrix kernel_frame(const ComplexMatrix& a, double rank_tol) {
  const int cols = static_cast<int>(a.cols());
  if (a.rows() == 0 || a.norm() == 0.0) return identity(cols);
  Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > rank_tol * s(0)) ++rank;
  }
  return svd.matrixV().rightCols(cols - rank);
}

ComplexMatrix matrix_exp(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) throw SizeMismatch("matrix_exp: matrix must be square");
  return a.exp();
}

ComplexMatrix complement_in(const ComplexMatrix& frame, const ComplexMatrix& ambient,
                            double rank_tol) {
  // Project the ambient basis off span(frame) and keep what survives.
  // Both inputs are orthonormal, so surviving singular values are ~1 and the
  // threshold is absolute.
  const ComplexMatrix residual = ambient - frame * (frame.adjoint() * ambient);
  const int n = static_cast<int>(ambient.rows());
  if (residual.cols() == 0) return ComplexMatrix::Zero(n, 0);
  Eigen::JacobiSVD<ComplexMatrix> svd(residual, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < s.size(); ++i) {
    if (s(i) > std::sqrt(rank_tol)) ++rank;
  }
  return svd.matrixU().leftCols(rank);
}

}  // namespace loopmaps
