#include "loopmaps/iwasawa.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "text.hpp"

namespace loopmaps {

namespace {

constexpr int kCheckPoints = 64;

int next_pow2(int v) {
  int p = 1;
  while (p < v) p <<= 1;
  return p;
}

// First block column of T_N^{-1}: solve T_N Y = E_0.
ComplexMatrix solve_first_column(const LaurentLoop& gamma, int plus_window, IwasawaMethod method) {
  const int n = gamma.n();
  const int dim = n * (plus_window + 1);
  ComplexMatrix rhs = ComplexMatrix::Zero(dim, n);
  rhs.topRows(n).setIdentity();
  if (method == IwasawaMethod::kCholesky) {
    Eigen::LLT<ComplexMatrix> llt(gram_toeplitz(gamma, plus_window));
    if (llt.info() != Eigen::Success) {
      throw FactorizationError("iwasawa_factorize: Gram matrix not positive definite (gamma singular on S^1?)");
    }
    return llt.solve(rhs);
  }
  const ComplexMatrix gm = multiplication_matrix(gamma, plus_window);
  Eigen::HouseholderQR<ComplexMatrix> qr(gm);
  const ComplexMatrix r = qr.matrixQR().topRows(dim).triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i) {
    if (!(std::abs(r(i, i)) > 1e-14 * std::abs(r(0, 0)))) {
      throw FactorizationError("iwasawa_factorize: multiplication operator is rank deficient");
    }
  }
  // R^* R Y = E_0
  ComplexMatrix w = r.adjoint().triangularView<Eigen::Lower>().solve(rhs);
  return r.triangularView<Eigen::Upper>().solve(w);
}

IwasawaFactors factorize_once(const LaurentLoop& gamma, int m, int plus_window, const IwasawaOptions& opts) {
  const int n = gamma.n();
  const ComplexMatrix y = solve_first_column(gamma, plus_window, opts.method);

  // Y_0^{-1} = b0^* b0 with b0 upper triangular, positive diagonal.
  const ComplexMatrix y0 = y.topRows(n);
  Eigen::LLT<ComplexMatrix> llt0(y0.inverse());
  if (llt0.info() != Eigen::Success) {
    throw FactorizationError("iwasawa_factorize: leading block of the inverse Gram is not positive");
  }
  const ComplexMatrix b0_adj = llt0.matrixL();

  std::vector<ComplexMatrix> cc(static_cast<std::size_t>(plus_window + 1));
  for (int j = 0; j <= plus_window; ++j) {
    cc[static_cast<std::size_t>(j)] = y.middleRows(j * n, n) * b0_adj;
  }
  // c = b^{-1} up to a constant unitary, so gamma c is the unitary factor.
  const LaurentLoop c(0, std::move(cc), plus_window + std::max(std::abs(gamma.kmin()), gamma.kmax()));
  LaurentLoop wide = loop_mul(gamma.truncated(c.trunc()), c);
  LaurentLoop phi = wide.truncated(m);

  const ComplexMatrix at_one = phi.eval(1.0);
  Eigen::PartialPivLU<ComplexMatrix> lu_one(at_one);
  phi = phi * lu_one.inverse();

  // b = Phi^{-1} gamma pointwise, then back to coefficients on [0, M].
  const int width = (phi.kmax() - phi.kmin()) + (gamma.kmax() - gamma.kmin()) + 1;
  const int samples = next_pow2(std::max(4 * m, width));
  const CircleSampler sampler(samples);
  std::vector<ComplexMatrix> phi_s(static_cast<std::size_t>(samples));
  std::vector<ComplexMatrix> gam_s(static_cast<std::size_t>(samples));
  circle_sample_into(phi, sampler, phi_s);
  circle_sample_into(gamma, sampler, gam_s);
  for (int s = 0; s < samples; ++s) {
    Eigen::PartialPivLU<ComplexMatrix> lu(phi_s[static_cast<std::size_t>(s)]);
    gam_s[static_cast<std::size_t>(s)] = lu.solve(gam_s[static_cast<std::size_t>(s)]);
  }
  const int lo = std::max(-m, -(samples / 2) + 1);
  const int hi = std::min(m, lo + samples - 1);
  LaurentLoop b_full = coeff_recover(gam_s, lo, hi, m, false).loop;

  IwasawaFactors out;
  out.diagnostics.plus_window = plus_window;
  out.diagnostics.purity = b_full.mass_outside(0, m);
  // The negative bins are reported as purity and dropped, not counted as discarded mass.
  std::vector<ComplexMatrix> plus;
  for (int k = 0; k <= std::max(0, b_full.kmax()); ++k) plus.push_back(b_full.coeff(k));
  out.b = LaurentLoop(0, std::move(plus), m);
  out.phi = std::move(phi);

  const ComplexMatrix id = identity(n);
  out.diagnostics.basedness = (out.phi.eval(1.0) - id).norm();
  // Off-grid check points, half a step away from the recovery samples.
  for (int s = 0; s < kCheckPoints; ++s) {
    const double t = 2.0 * std::numbers::pi * (s + 0.5) / kCheckPoints;
    const Complex lam(std::cos(t), std::sin(t));
    const ComplexMatrix pv = out.phi.eval(lam);
    out.diagnostics.unitarity = std::max(out.diagnostics.unitarity, (pv.adjoint() * pv - id).norm());
    out.diagnostics.round_trip =
        std::max(out.diagnostics.round_trip, (gamma.eval(lam) - pv * out.b.eval(lam)).norm());
  }
  return out;
}

bool within(const IwasawaDiagnostics& d, double tol) {
  return d.round_trip <= tol && d.unitarity <= tol && d.basedness <= tol && d.purity <= tol;
}

}  // namespace

ComplexMatrix gram_toeplitz(const LaurentLoop& gamma, int plus_window) {
  const int n = gamma.n();
  const int w = gamma.kmax() - gamma.kmin();
  // F_k = sum_j A_j^* A_{j+k}, |k| <= w
  std::vector<ComplexMatrix> f(static_cast<std::size_t>(2 * w + 1), ComplexMatrix::Zero(n, n));
  const auto& a = gamma.coeffs();
  for (int i = 0; i <= w; ++i) {
    const ComplexMatrix ai = a[static_cast<std::size_t>(i)].adjoint();
    for (int j = 0; j <= w; ++j) {
      f[static_cast<std::size_t>(j - i + w)].noalias() += ai * a[static_cast<std::size_t>(j)];
    }
  }
  const int dim = n * (plus_window + 1);
  ComplexMatrix t = ComplexMatrix::Zero(dim, dim);
  for (int i = 0; i <= plus_window; ++i) {
    for (int j = std::max(0, i - w); j <= std::min(plus_window, i + w); ++j) {
      t.block(i * n, j * n, n, n) = f[static_cast<std::size_t>(i - j + w)];
    }
  }
  return t;
}

ComplexMatrix multiplication_matrix(const LaurentLoop& gamma, int plus_window) {
  const int n = gamma.n();
  const int w = gamma.kmax() - gamma.kmin();
  const int rows = w + plus_window + 1;
  ComplexMatrix g = ComplexMatrix::Zero(n * rows, n * (plus_window + 1));
  for (int j = 0; j <= plus_window; ++j) {
    for (int k = 0; k <= w; ++k) {
      g.block((j + k) * n, j * n, n, n) = gamma.coeffs()[static_cast<std::size_t>(k)];
    }
  }
  return g;
}

IwasawaFactors iwasawa_factorize(const LaurentLoop& gamma, const IwasawaOptions& opts) {
  const int m = opts.trunc > 0 ? opts.trunc : gamma.trunc();
  int plus_window = opts.plus_window > 0 ? opts.plus_window : 2 * m;
  const LaurentLoop g = gamma.trimmed(0.0);
  IwasawaFactors best;
  for (int attempt = 0; attempt <= opts.max_doublings; ++attempt) {
    IwasawaFactors f = factorize_once(g, m, plus_window, opts);
    if (within(f.diagnostics, opts.tol)) return f;
    best = std::move(f);
    plus_window *= 2;
  }
  const auto& d = best.diagnostics;
  throw TruncationError("iwasawa_factorize: defects above tol " + text::sci(opts.tol) +
                        " (round trip " + text::sci(d.round_trip) + ", unitarity " +
                        text::sci(d.unitarity) + ", basedness " + text::sci(d.basedness) +
                        ", purity " + text::sci(d.purity) + ") at plus-window " +
                        std::to_string(d.plus_window) + "; increase the truncation");
}

}  // namespace loopmaps
