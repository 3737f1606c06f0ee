#pragma once

#include <span>
#include <vector>

#include "loopmaps/matrix_core.hpp"

namespace loopmaps {

inline constexpr int kDefaultTruncation = 32;
inline constexpr double kMembershipTol = 1e-8;

/// Finite Laurent series  sum_{k=kmin}^{kmax} A_k lambda^k  with n x n
/// coefficients. Frequencies are kept inside |k| <= trunc; whatever products
/// push outside that window is dropped and its Frobenius mass accumulated in
/// discarded_mass().
class LaurentLoop {
 public:
  LaurentLoop() = default;
  LaurentLoop(int kmin, std::vector<ComplexMatrix> coeffs, int trunc = kDefaultTruncation);

  static LaurentLoop zero(int n, int trunc = kDefaultTruncation);
  static LaurentLoop identity(int n, int trunc = kDefaultTruncation);
  static LaurentLoop constant(const ComplexMatrix& a, int trunc = kDefaultTruncation);
  /// a * lambda^k
  static LaurentLoop monomial(const ComplexMatrix& a, int k, int trunc = kDefaultTruncation);

  int n() const { return n_; }
  int kmin() const { return kmin_; }
  int kmax() const { return kmin_ + static_cast<int>(coeffs_.size()) - 1; }
  int trunc() const { return trunc_; }
  const std::vector<ComplexMatrix>& coeffs() const { return coeffs_; }
  /// Coefficient of lambda^k (zero outside the stored window).
  ComplexMatrix coeff(int k) const;
  double discarded_mass() const { return discarded_; }
  void add_discarded(double mass) { discarded_ += mass; }

  ComplexMatrix eval(Complex lambda) const;

  /// Loop whose values on S^1 are the pointwise adjoints: coefficients A_{-k}^*.
  LaurentLoop adjoint() const;
  /// lambda^s * this
  LaurentLoop shifted(int s) const;
  /// Clip to |k| <= trunc, adding the dropped mass to discarded_mass().
  LaurentLoop truncated(int trunc) const;
  /// Drop leading/trailing coefficients with Frobenius norm <= abs_tol.
  LaurentLoop trimmed(double abs_tol) const;

  /// sup_k ||A_k - B_k||_F
  double distance(const LaurentLoop& other) const;
  /// sup of ||A_k||_F over k outside [lo, hi]
  double mass_outside(int lo, int hi) const;
  double max_coeff_norm() const;

  bool is_based(double tol = kMembershipTol) const;
  bool is_unitary_circle(double tol = kMembershipTol, int samples = 64) const;
  /// Coefficients of negative frequency vanish (membership in Lambda_+).
  bool is_plus(double tol = kMembershipTol) const;
  /// Coefficients below lambda^{-1} vanish (values in Lambda_{-1,infty}).
  bool is_minus_one_infty(double tol = kMembershipTol) const;
  /// Q0 A_k Q0 = (-1)^k A_k for every k.
  bool is_twisted(const ComplexMatrix& q0, double tol = kMembershipTol) const;
  double twist_defect(const ComplexMatrix& q0) const;

  LaurentLoop& operator+=(const LaurentLoop& other);
  LaurentLoop& operator-=(const LaurentLoop& other);
  LaurentLoop& operator*=(Complex s);

 private:
  int n_ = 0;
  int kmin_ = 0;
  int trunc_ = kDefaultTruncation;
  std::vector<ComplexMatrix> coeffs_;
  double discarded_ = 0.0;
};

LaurentLoop operator+(LaurentLoop a, const LaurentLoop& b);
LaurentLoop operator-(LaurentLoop a, const LaurentLoop& b);
LaurentLoop operator*(Complex s, LaurentLoop a);
LaurentLoop operator*(const ComplexMatrix& m, const LaurentLoop& a);
LaurentLoop operator*(const LaurentLoop& a, const ComplexMatrix& m);

/// Convolution product truncated to |k| <= min(a.trunc, b.trunc).
LaurentLoop loop_mul(const LaurentLoop& a, const LaurentLoop& b);
inline LaurentLoop operator*(const LaurentLoop& a, const LaurentLoop& b) { return loop_mul(a, b); }

/// Roots of unity exp(2 pi i s / S), with exact lookup of integer powers.
class CircleSampler {
 public:
  explicit CircleSampler(int samples);
  int samples() const { return samples_; }
  const std::vector<Complex>& points() const { return roots_; }
  /// omega^m for any integer m.
  Complex power(long long m) const;

 private:
  int samples_;
  std::vector<Complex> roots_;
};

/// Values at the `samples` roots of unity.
std::vector<ComplexMatrix> circle_sample(const LaurentLoop& a, int samples);
void circle_sample_into(const LaurentLoop& a, const CircleSampler& sampler,
                        std::span<ComplexMatrix> out);

struct RecoveredLoop {
  LaurentLoop loop;
  /// sup norm of the DFT bins that fall outside [kmin, kmax]: zero when the
  /// sampled function is band-limited to the requested window.
  double aliasing_defect = 0.0;
};

/// Discrete Fourier recovery of the coefficients kmin..kmax from values at the
/// roots of unity. Requires kmax - kmin + 1 <= samples.
RecoveredLoop coeff_recover(std::span<const ComplexMatrix> samples, int kmin, int kmax,
                            int trunc = kDefaultTruncation, bool want_defect = true);

/// circle_sample followed by coeff_recover on the loop's own window (clipped
/// to what `samples` can resolve); the defect is the coefficient distance to
/// the input. Throws SizeMismatch when samples < max(|kmin|, |kmax|).
RecoveredLoop circle_round_trip(const LaurentLoop& a, int samples);

struct LoopInverse {
  LaurentLoop inverse;
  /// max over 2*samples points of S^1 of ||a a^{-1} - I||_F
  double residual = 0.0;
};

/// Pointwise inversion at `samples` roots of unity and coefficient recovery
/// on |k| <= trunc. Throws FactorizationError at a singular sample and
/// TruncationError when the off-grid residual exceeds `tol`.
LoopInverse loop_inverse(const LaurentLoop& a, int samples, double tol = 1e-8);

/// max_k ||A_k - conj(A_{-k})||_F with entrywise conjugation.
double adjoint_reality_defect(const LaurentLoop& a);

/// max over sample points on S^1 of ||gamma^* gamma - I||_F.
double unitarity_defect(const LaurentLoop& a, int samples = 64);

}  // namespace loopmaps
