#include "loopmaps/loop_algebra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "text.hpp"

namespace loopmaps {

namespace {

void require_same_n(const LaurentLoop& a, const LaurentLoop& b, const char* op) {
  if (a.n() != b.n()) {
    throw SizeMismatch(std::string(op) + ": loop sizes " + std::to_string(a.n()) + " and " +
                       std::to_string(b.n()) + " differ");
  }
}

}  // namespace

LaurentLoop::LaurentLoop(int kmin, std::vector<ComplexMatrix> coeffs, int trunc)
    : kmin_(kmin), trunc_(trunc), coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw SizeMismatch("LaurentLoop: needs at least one coefficient");
  n_ = static_cast<int>(coeffs_.front().rows());
  for (const auto& c : coeffs_) {
    if (c.rows() != n_ || c.cols() != n_) {
      throw SizeMismatch("LaurentLoop: coefficients must all be " + std::to_string(n_) + "x" +
                         std::to_string(n_));
    }
  }
  if (kmin_ < -trunc_ || kmax() > trunc_) *this = truncated(trunc_);
}

LaurentLoop LaurentLoop::zero(int n, int trunc) {
  return LaurentLoop(0, {ComplexMatrix::Zero(n, n)}, trunc);
}

LaurentLoop LaurentLoop::identity(int n, int trunc) {
  return LaurentLoop(0, {loopmaps::identity(n)}, trunc);
}

LaurentLoop LaurentLoop::constant(const ComplexMatrix& a, int trunc) {
  return LaurentLoop(0, {a}, trunc);
}

LaurentLoop LaurentLoop::monomial(const ComplexMatrix& a, int k, int trunc) {
  return LaurentLoop(k, {a}, trunc);
}

ComplexMatrix LaurentLoop::coeff(int k) const {
  if (k < kmin_ || k > kmax()) return ComplexMatrix::Zero(n_, n_);
  return coeffs_[static_cast<std::size_t>(k - kmin_)];
}

ComplexMatrix LaurentLoop::eval(Complex lambda) const {
  if (lambda == Complex(0.0) && kmin_ < 0) {
    throw DomainError("LaurentLoop::eval: lambda = 0 with negative frequencies");
  }
  const int hi = kmax();
  auto at = [&](int k) -> const ComplexMatrix& { return coeffs_[static_cast<std::size_t>(k - kmin_)]; };
  ComplexMatrix acc = ComplexMatrix::Zero(n_, n_);
  // Horner in lambda over k >= 0, in 1/lambda over k < 0.
  if (hi >= 0) {
    const int lo = std::max(kmin_, 0);
    for (int k = hi; k >= lo; --k) {
      acc *= lambda;
      acc += at(k);
    }
    if (lo > 0) acc *= std::pow(lambda, lo);
  }
  if (kmin_ < 0) {
    const Complex inv = 1.0 / lambda;
    const int top = std::min(hi, -1);
    ComplexMatrix neg = ComplexMatrix::Zero(n_, n_);
    for (int k = kmin_; k <= top; ++k) {
      neg *= inv;
      neg += at(k);
    }
    acc += neg * std::pow(inv, -top);
  }
  return acc;
}

LaurentLoop LaurentLoop::adjoint() const {
  std::vector<ComplexMatrix> out(coeffs_.size());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    out[coeffs_.size() - 1 - i] = coeffs_[i].adjoint();
  }
  LaurentLoop r(-kmax(), std::move(out), trunc_);
  r.discarded_ = discarded_;
  return r;
}

LaurentLoop LaurentLoop::shifted(int s) const {
  LaurentLoop r = *this;
  r.kmin_ += s;
  if (r.kmin_ < -trunc_ || r.kmax() > trunc_) r = r.truncated(trunc_);
  return r;
}

LaurentLoop LaurentLoop::truncated(int trunc) const {
  const int lo = std::max(kmin_, -trunc);
  const int hi = std::min(kmax(), trunc);
  double dropped = 0.0;
  for (int k = kmin_; k <= kmax(); ++k) {
    if (k < lo || k > hi) dropped += coeffs_[static_cast<std::size_t>(k - kmin_)].norm();
  }
  LaurentLoop r;
  r.n_ = n_;
  r.trunc_ = trunc;
  r.discarded_ = discarded_ + dropped;
  if (lo > hi) {
    r.kmin_ = 0;
    r.coeffs_.assign(1, ComplexMatrix::Zero(n_, n_));
    return r;
  }
  r.kmin_ = lo;
  r.coeffs_.assign(coeffs_.begin() + (lo - kmin_), coeffs_.begin() + (hi - kmin_ + 1));
  return r;
}

LaurentLoop LaurentLoop::trimmed(double abs_tol) const {
  int lo = kmin_;
  int hi = kmax();
  while (lo < hi && coeffs_[static_cast<std::size_t>(lo - kmin_)].norm() <= abs_tol) ++lo;
  while (hi > lo && coeffs_[static_cast<std::size_t>(hi - kmin_)].norm() <= abs_tol) --hi;
  LaurentLoop r;
  r.n_ = n_;
  r.trunc_ = trunc_;
  r.discarded_ = discarded_;
  r.kmin_ = lo;
  r.coeffs_.assign(coeffs_.begin() + (lo - kmin_), coeffs_.begin() + (hi - kmin_ + 1));
  return r;
}

double LaurentLoop::distance(const LaurentLoop& other) const {
  require_same_n(*this, other, "distance");
  const int lo = std::min(kmin_, other.kmin_);
  const int hi = std::max(kmax(), other.kmax());
  double d = 0.0;
  for (int k = lo; k <= hi; ++k) d = std::max(d, (coeff(k) - other.coeff(k)).norm());
  return d;
}

double LaurentLoop::mass_outside(int lo, int hi) const {
  double m = 0.0;
  for (int k = kmin_; k <= kmax(); ++k) {
    if (k < lo || k > hi) m = std::max(m, coeffs_[static_cast<std::size_t>(k - kmin_)].norm());
  }
  return m;
}

double LaurentLoop::max_coeff_norm() const {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, c.norm());
  return m;
}

bool LaurentLoop::is_based(double tol) const {
  return (eval(1.0) - loopmaps::identity(n_)).norm() < tol;
}

bool LaurentLoop::is_unitary_circle(double tol, int samples) const {
  return unitarity_defect(*this, samples) < tol;
}

bool LaurentLoop::is_plus(double tol) const { return mass_outside(0, trunc_) <= tol; }

bool LaurentLoop::is_minus_one_infty(double tol) const { return mass_outside(-1, trunc_) <= tol; }

double LaurentLoop::twist_defect(const ComplexMatrix& q0) const {
  double d = 0.0;
  for (int k = kmin_; k <= kmax(); ++k) {
    const auto& a = coeffs_[static_cast<std::size_t>(k - kmin_)];
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    d = std::max(d, (q0 * a * q0 - sign * a).norm());
  }
  return d;
}

bool LaurentLoop::is_twisted(const ComplexMatrix& q0, double tol) const {
  return twist_defect(q0) <= tol;
}

LaurentLoop& LaurentLoop::operator+=(const LaurentLoop& other) {
  require_same_n(*this, other, "operator+");
  const int lo = std::min(kmin_, other.kmin_);
  const int hi = std::max(kmax(), other.kmax());
  std::vector<ComplexMatrix> out(static_cast<std::size_t>(hi - lo + 1));
  for (int k = lo; k <= hi; ++k) out[static_cast<std::size_t>(k - lo)] = coeff(k) + other.coeff(k);
  kmin_ = lo;
  coeffs_ = std::move(out);
  discarded_ += other.discarded_;
  return *this;
}

LaurentLoop& LaurentLoop::operator-=(const LaurentLoop& other) {
  LaurentLoop neg = other;
  neg *= -1.0;
  return *this += neg;
}

LaurentLoop& LaurentLoop::operator*=(Complex s) {
  for (auto& c : coeffs_) c *= s;
  discarded_ *= std::abs(s);
  return *this;
}

LaurentLoop operator+(LaurentLoop a, const LaurentLoop& b) { return a += b; }
LaurentLoop operator-(LaurentLoop a, const LaurentLoop& b) { return a -= b; }
LaurentLoop operator*(Complex s, LaurentLoop a) { return a *= s; }

LaurentLoop operator*(const ComplexMatrix& m, const LaurentLoop& a) {
  std::vector<ComplexMatrix> out;
  out.reserve(a.coeffs().size());
  for (const auto& c : a.coeffs()) out.push_back(m * c);
  LaurentLoop r(a.kmin(), std::move(out), a.trunc());
  r.add_discarded(a.discarded_mass() * m.norm());
  return r;
}

LaurentLoop operator*(const LaurentLoop& a, const ComplexMatrix& m) {
  std::vector<ComplexMatrix> out;
  out.reserve(a.coeffs().size());
  for (const auto& c : a.coeffs()) out.push_back(c * m);
  LaurentLoop r(a.kmin(), std::move(out), a.trunc());
  r.add_discarded(a.discarded_mass() * m.norm());
  return r;
}

LaurentLoop loop_mul(const LaurentLoop& a, const LaurentLoop& b) {
  require_same_n(a, b, "loop_mul");
  const int n = a.n();
  const int lo = a.kmin() + b.kmin();
  const int hi = a.kmax() + b.kmax();
  std::vector<ComplexMatrix> out(static_cast<std::size_t>(hi - lo + 1), ComplexMatrix::Zero(n, n));
  for (int i = a.kmin(); i <= a.kmax(); ++i) {
    const auto& ai = a.coeffs()[static_cast<std::size_t>(i - a.kmin())];
    for (int j = b.kmin(); j <= b.kmax(); ++j) {
      out[static_cast<std::size_t>(i + j - lo)].noalias() +=
          ai * b.coeffs()[static_cast<std::size_t>(j - b.kmin())];
    }
  }
  const int trunc = std::min(a.trunc(), b.trunc());
  // Build untruncated first, then clip so the dropped mass is recorded.
  LaurentLoop wide(lo, std::move(out), std::max({trunc, std::abs(lo), std::abs(hi)}));
  LaurentLoop r = wide.truncated(trunc);
  r.add_discarded(a.discarded_mass() * b.max_coeff_norm() + b.discarded_mass() * a.max_coeff_norm());
  return r;
}

CircleSampler::CircleSampler(int samples) : samples_(samples) {
  if (samples < 1) throw SizeMismatch("CircleSampler: need at least one sample");
  roots_.resize(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    const double t = 2.0 * std::numbers::pi * s / samples;
    roots_[static_cast<std::size_t>(s)] = Complex(std::cos(t), std::sin(t));
  }
}

Complex CircleSampler::power(long long m) const {
  long long r = m % samples_;
  if (r < 0) r += samples_;
  return roots_[static_cast<std::size_t>(r)];
}

void circle_sample_into(const LaurentLoop& a, const CircleSampler& sampler,
                        std::span<ComplexMatrix> out) {
  const int s_count = sampler.samples();
  for (int s = 0; s < s_count; ++s) {
    ComplexMatrix& acc = out[static_cast<std::size_t>(s)];
    acc.setZero(a.n(), a.n());
    for (int k = a.kmin(); k <= a.kmax(); ++k) {
      acc += sampler.power(static_cast<long long>(s) * k) *
             a.coeffs()[static_cast<std::size_t>(k - a.kmin())];
    }
  }
}

std::vector<ComplexMatrix> circle_sample(const LaurentLoop& a, int samples) {
  CircleSampler sampler(samples);
  std::vector<ComplexMatrix> out(static_cast<std::size_t>(samples));
  circle_sample_into(a, sampler, out);
  return out;
}

RecoveredLoop coeff_recover(std::span<const ComplexMatrix> samples, int kmin, int kmax, int trunc,
                            bool want_defect) {
  const int s_count = static_cast<int>(samples.size());
  if (s_count == 0) throw SizeMismatch("coeff_recover: no samples");
  const int width = kmax - kmin + 1;
  if (width < 1 || width > s_count) {
    throw SizeMismatch("coeff_recover: window of " + std::to_string(width) +
                       " frequencies needs at least that many samples, got " +
                       std::to_string(s_count));
  }
  const int n = static_cast<int>(samples.front().rows());
  CircleSampler sampler(s_count);
  auto bin = [&](int k) {
    ComplexMatrix acc = ComplexMatrix::Zero(n, n);
    for (int s = 0; s < s_count; ++s) {
      acc += sampler.power(-static_cast<long long>(s) * k) * samples[static_cast<std::size_t>(s)];
    }
    return ComplexMatrix(acc / static_cast<double>(s_count));
  };
  std::vector<ComplexMatrix> coeffs;
  coeffs.reserve(static_cast<std::size_t>(width));
  for (int k = kmin; k <= kmax; ++k) coeffs.push_back(bin(k));
  RecoveredLoop out;
  if (want_defect) {
    for (int k = kmax + 1; k < kmin + s_count; ++k) {
      out.aliasing_defect = std::max(out.aliasing_defect, bin(k).norm());
    }
  }
  out.loop = LaurentLoop(kmin, std::move(coeffs), std::max({trunc, std::abs(kmin), std::abs(kmax)}));
  if (out.loop.trunc() != trunc) out.loop = out.loop.truncated(trunc);
  return out;
}

RecoveredLoop circle_round_trip(const LaurentLoop& a, int samples) {
  const int bandwidth = std::max(std::abs(a.kmin()), std::abs(a.kmax()));
  if (samples < bandwidth) {
    throw SizeMismatch("circle_round_trip: " + std::to_string(samples) +
                       " samples below bandwidth " + std::to_string(bandwidth));
  }
  int lo = a.kmin();
  int hi = a.kmax();
  if (hi - lo + 1 > samples) {
    // Resolve the centred window the sample count can carry.
    lo = -(samples / 2);
    hi = lo + samples - 1;
  }
  const auto values = circle_sample(a, samples);
  RecoveredLoop r = coeff_recover(values, lo, hi, a.trunc(), false);
  r.aliasing_defect = r.loop.distance(a);
  return r;
}

LoopInverse loop_inverse(const LaurentLoop& a, int samples, double tol) {
  const int width = a.kmax() - a.kmin();
  if (samples < 2 * width + 1 || (samples & (samples - 1)) != 0) {
    throw SizeMismatch("loop_inverse: samples must be a power of two >= " +
                       std::to_string(2 * width + 1));
  }
  const auto values = circle_sample(a, samples);
  std::vector<ComplexMatrix> inv(values.size());
  for (std::size_t s = 0; s < values.size(); ++s) {
    Eigen::PartialPivLU<ComplexMatrix> lu(values[s]);
    const double cond_est = 1.0 / std::max(lu.rcond(), 1e-300);
    if (!(cond_est < kDefaultConditionCap)) {
      throw FactorizationError("loop_inverse: singular sample at index " + std::to_string(s));
    }
    inv[s] = lu.inverse();
  }
  const int m = a.trunc();
  int lo = -m;
  int hi = m;
  if (hi - lo + 1 > samples) {
    lo = -(samples / 2);
    hi = lo + samples - 1;
  }
  LoopInverse out;
  out.inverse = coeff_recover(inv, lo, hi, m, false).loop.trimmed(0.0);
  // Check between the sample points as well, where aliasing shows up.
  const CircleSampler fine(2 * samples);
  const ComplexMatrix id = identity(a.n());
  for (const Complex& z : fine.points()) {
    out.residual = std::max(out.residual, (a.eval(z) * out.inverse.eval(z) - id).norm());
  }
  if (!(out.residual <= tol)) {
    throw TruncationError("loop_inverse: residual " + text::sci(out.residual) +
                          " above tolerance; increase the truncation or the sample count");
  }
  return out;
}

double adjoint_reality_defect(const LaurentLoop& a) {
  double d = 0.0;
  const int bound = std::max(std::abs(a.kmin()), std::abs(a.kmax()));
  for (int k = -bound; k <= bound; ++k) {
    d = std::max(d, (a.coeff(k) - a.coeff(-k).conjugate()).norm());
  }
  return d;
}

double unitarity_defect(const LaurentLoop& a, int samples) {
  const CircleSampler sampler(samples);
  const ComplexMatrix id = identity(a.n());
  double d = 0.0;
  for (const Complex& z : sampler.points()) {
    const ComplexMatrix v = a.eval(z);
    d = std::max(d, (v.adjoint() * v - id).norm());
  }
  return d;
}

}  // namespace loopmaps
