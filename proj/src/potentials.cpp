#include "loopmaps/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "text.hpp"

namespace loopmaps {

namespace {

std::vector<ComplexMatrix> sample_loop(const LaurentLoop& a, const std::vector<Complex>& lambdas) {
  std::vector<ComplexMatrix> out;
  out.reserve(lambdas.size());
  for (const Complex& l : lambdas) out.push_back(a.eval(l));
  return out;
}

std::vector<Complex> circle_points(int samples) { return CircleSampler(samples).points(); }

// Recover a loop from values at the `samples` roots of unity on |k| <= trunc.
LaurentLoop recover_symmetric(const std::vector<ComplexMatrix>& values, int trunc) {
  const int s = static_cast<int>(values.size());
  const int lo = std::max(-trunc, -(s / 2) + 1);
  const int hi = std::min(trunc, lo + s - 1);
  return coeff_recover(values, lo, hi, trunc, false).loop;
}

}  // namespace

Potential::Potential(int n, Kind kind, bool has_dzbar, Binder binder, std::string label)
    : n_(n), kind_(kind), has_dzbar_(has_dzbar), binder_(std::move(binder)), label_(std::move(label)) {}

Potential Potential::polynomial(std::vector<PotentialTerm> terms) {
  if (terms.empty()) throw ConfigError("polynomial potential: no terms");
  const int n = terms.front().loop.n();
  for (const auto& t : terms) {
    if (t.loop.n() != n) throw SizeMismatch("polynomial potential: terms of different size");
    if (t.zpow < 0 || t.zpow > kMaxZDegree) {
      throw DomainError("polynomial potential: z power " + std::to_string(t.zpow) + " outside [0, " +
                        std::to_string(kMaxZDegree) + "]");
    }
    if (t.loop.mass_outside(-1, t.loop.trunc()) > 0.0) {
      throw DomainError("polynomial potential: dz part must lie in Lambda_{-1,infty} (kmin >= -1)");
    }
  }
  const std::vector<PotentialTerm> stored = terms;
  Binder binder = [stored, n](std::vector<Complex> lambdas) -> PointEvaluator {
    std::vector<std::vector<ComplexMatrix>> sampled;
    std::vector<int> powers;
    for (const auto& t : stored) {
      sampled.push_back(sample_loop(t.loop, lambdas));
      powers.push_back(t.zpow);
    }
    return [sampled = std::move(sampled), powers = std::move(powers), n](
               Complex z, std::span<ComplexMatrix> xi, std::span<ComplexMatrix> zeta) {
      for (std::size_t s = 0; s < xi.size(); ++s) {
        xi[s].setZero(n, n);
        zeta[s].setZero(n, n);
      }
      for (std::size_t t = 0; t < sampled.size(); ++t) {
        const Complex zp = std::pow(z, powers[t]);
        for (std::size_t s = 0; s < xi.size(); ++s) xi[s] += zp * sampled[t][s];
      }
    };
  };
  Potential p(n, Kind::kPolynomial, false, std::move(binder), "polynomial");
  p.terms_ = std::move(terms);
  return p;
}

Potential Potential::zero(int n) {
  return polynomial({PotentialTerm{0, LaurentLoop::zero(n)}});
}

std::optional<LaurentLoop> Potential::constant_xi() const {
  if (kind_ != Kind::kPolynomial || has_dzbar_) return std::nullopt;
  std::optional<LaurentLoop> acc;
  for (const auto& t : terms_) {
    if (t.zpow != 0) {
      if (t.loop.max_coeff_norm() > 0.0) return std::nullopt;
      continue;
    }
    acc = acc ? *acc + t.loop : t.loop;
  }
  return acc;
}

LaurentLoop Potential::xi_loop(Complex z, int trunc) const {
  const auto lambdas = circle_points(4 * trunc);
  const PointEvaluator ev = bind(lambdas);
  std::vector<ComplexMatrix> xi(lambdas.size()), zeta(lambdas.size());
  ev(z, xi, zeta);
  return recover_symmetric(xi, trunc);
}

LaurentLoop Potential::zeta_loop(Complex z, int trunc) const {
  const auto lambdas = circle_points(4 * trunc);
  const PointEvaluator ev = bind(lambdas);
  std::vector<ComplexMatrix> xi(lambdas.size()), zeta(lambdas.size());
  ev(z, xi, zeta);
  return recover_symmetric(zeta, trunc);
}

// ---------------------------------------------------------------- finite type

Potential FiniteTypePotential::potential() const {
  Potential p = Potential::polynomial({PotentialTerm{0, eta.shifted(d - 1)}});
  return p;
}

ComplexMatrix FiniteTypePotential::lowest_minus() const {
  if (!q0) throw DomainError("finite type potential: the (0,1) part needs a base point Q0");
  const int n = eta.n();
  const ComplexMatrix p0 = 0.5 * (identity(n) + *q0);
  return p0 * lowest() * (identity(n) - p0);
}

ComplexMatrix FiniteTypePotential::lowest_plus() const {
  if (!q0) throw DomainError("finite type potential: the (1,0) part needs a base point Q0");
  const int n = eta.n();
  const ComplexMatrix p0 = 0.5 * (identity(n) + *q0);
  return (identity(n) - p0) * lowest() * p0;
}

double FiniteTypePotential::based_defect() const { return eta.eval(1.0).norm(); }

FiniteTypePotential finite_type_potential(int d, const LaurentLoop& eta, std::optional<ComplexMatrix> q0,
                                          double tol) {
  if (d <= 0 || d % 2 == 0) {
    throw DomainError("finite type potential: d must be odd and positive, got " + std::to_string(d));
  }
  if (eta.mass_outside(-d, d) > 0.0) {
    throw DomainError("finite type potential: eta has frequencies beyond |k| <= " + std::to_string(d));
  }
  const double scale = std::max(1.0, eta.max_coeff_norm());
  double reality = 0.0;
  for (int k = 0; k <= d; ++k) {
    reality = std::max(reality, (eta.coeff(-k) + eta.coeff(k).adjoint()).norm());
  }
  if (reality > tol * scale) {
    throw DomainError("finite type potential: reality defect max_k ||eta_{-k} + eta_k^*|| = " +
                      text::sci(reality));
  }
  if (q0) {
    const int n = eta.n();
    if (q0->rows() != n || q0->cols() != n) throw SizeMismatch("finite type potential: Q0 has the wrong size");
    if ((*q0 * *q0 - identity(n)).norm() > 1e-12 || !is_hermitian(*q0, 1e-12)) {
      throw DomainError("finite type potential: Q0 must be a Hermitian involution");
    }
    const double twist = eta.twist_defect(*q0);
    if (twist > tol * scale) {
      throw DomainError("finite type potential: twist defect " + text::sci(twist));
    }
  }
  FiniteTypePotential p;
  p.d = d;
  p.eta = eta;
  p.q0 = std::move(q0);
  return p;
}

ComplexMatrix ker_minus_part(const FiniteTypePotential& p, KernelDomain domain, double rank_tol) {
  const ComplexMatrix minus = p.lowest_minus();
  if (domain == KernelDomain::kFullSpace) return kernel_frame(minus, rank_tol);
  const int n = p.eta.n();
  const ComplexMatrix p0perp = 0.5 * (identity(n) - *p.q0);
  const ImageFrame basis = svd_image(p0perp, 1e-12);
  if (basis.rank == 0) return ComplexMatrix::Zero(n, 0);
  const ComplexMatrix restricted = minus * basis.frame;
  return basis.frame * kernel_frame(restricted, rank_tol);
}

ComplexMatrix ker_lowest(const FiniteTypePotential& p, double rank_tol) {
  return kernel_frame(p.lowest(), rank_tol);
}

// ---------------------------------------------------------------- gauges

GaugeMap GaugeMap::plus(std::vector<PotentialTerm> terms) {
  if (terms.empty()) throw ConfigError("plus gauge: no terms");
  GaugeMap g;
  g.kind_ = Kind::kPlus;
  g.n_ = terms.front().loop.n();
  for (const auto& t : terms) {
    if (t.loop.n() != g.n_) throw SizeMismatch("plus gauge: terms of different size");
    if (t.zpow < 0 || t.zpow > kMaxZDegree) throw DomainError("plus gauge: z power out of range");
    if (t.loop.mass_outside(0, t.loop.trunc()) > 0.0) {
      throw DomainError("plus gauge: coefficients must lie in Lambda_+ (kmin >= 0)");
    }
  }
  g.terms_ = std::move(terms);
  return g;
}

GaugeMap GaugeMap::constant(const LaurentLoop& h) { return plus({PotentialTerm{0, h}}); }

GaugeMap GaugeMap::uniton(const PolynomialFrame& frame) {
  GaugeMap g;
  g.kind_ = Kind::kUniton;
  g.n_ = frame.n();
  g.frame_ = frame;
  return g;
}

GaugeMap build_uniton_gauge(const PolynomialFrame& frame) { return GaugeMap::uniton(frame); }

LaurentLoop GaugeMap::loop_at(Complex z, int trunc) const {
  if (kind_ == Kind::kPlus) {
    LaurentLoop acc = LaurentLoop::zero(n_, trunc);
    for (const auto& t : terms_) acc += std::pow(z, t.zpow) * t.loop.truncated(trunc);
    return acc;
  }
  const ComplexMatrix pi = hermitian_projection(frame_->eval(z));
  return LaurentLoop::constant(pi, trunc) + LaurentLoop::monomial(identity(n_) - pi, -1, trunc);
}

GaugeMap::JetEvaluator GaugeMap::bind(std::vector<Complex> lambdas) const {
  if (kind_ == Kind::kPlus) {
    std::vector<std::vector<ComplexMatrix>> sampled;
    std::vector<int> powers;
    for (const auto& t : terms_) {
      sampled.push_back(sample_loop(t.loop, lambdas));
      powers.push_back(t.zpow);
    }
    const int n = n_;
    return [sampled = std::move(sampled), powers = std::move(powers), n](Complex z, Jet& out) {
      const std::size_t s_count = sampled.front().size();
      out.value.assign(s_count, ComplexMatrix::Zero(n, n));
      out.dz.assign(s_count, ComplexMatrix::Zero(n, n));
      out.dzbar.assign(s_count, ComplexMatrix::Zero(n, n));
      for (std::size_t t = 0; t < sampled.size(); ++t) {
        const int j = powers[t];
        const Complex zp = std::pow(z, j);
        const Complex dzp = j == 0 ? Complex(0.0) : static_cast<double>(j) * std::pow(z, j - 1);
        for (std::size_t s = 0; s < s_count; ++s) {
          out.value[s] += zp * sampled[t][s];
          if (j > 0) out.dz[s] += dzp * sampled[t][s];
        }
      }
    };
  }
  const PolynomialFrame frame = *frame_;
  const int n = n_;
  return [frame, n, lambdas = std::move(lambdas)](Complex z, Jet& out) {
    const ProjectionJet jet = projection_jet(frame, z);
    const ComplexMatrix perp = identity(n) - jet.pi;
    const std::size_t s_count = lambdas.size();
    out.value.resize(s_count);
    out.dz.resize(s_count);
    out.dzbar.resize(s_count);
    for (std::size_t s = 0; s < s_count; ++s) {
      const Complex inv = 1.0 / lambdas[s];
      out.value[s] = jet.pi + inv * perp;
      out.dz[s] = (1.0 - inv) * jet.d_pi;
      out.dzbar[s] = (1.0 - inv) * jet.dbar_pi;
    }
  };
}

AdmissibilityReport uniton_admissibility(const GaugeMap& h, const Potential& mu, const Grid& grid) {
  if (h.kind() != GaugeMap::Kind::kUniton) return {};
  AdmissibilityReport r;
  const int trunc = 8;
  const auto lambdas = circle_points(4 * trunc);
  const PointEvaluator ev = mu.bind(lambdas);
  std::vector<ComplexMatrix> xi(lambdas.size()), zeta(lambdas.size());
  const int n = mu.n();
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      const Complex z = grid.z(i, j);
      ev(z, xi, zeta);
      const ComplexMatrix m1 = recover_symmetric(xi, trunc).coeff(-1);
      const ComplexMatrix pi = hermitian_projection(h.frame()->eval(z));
      const double defect = ((identity(n) - pi) * m1 * pi).norm();
      r.scale = std::max(r.scale, m1.norm());
      if (r.argmax_i < 0 || defect > r.max_defect) {
        r.max_defect = defect;
        r.argmax_i = i;
        r.argmax_j = j;
      }
    }
  }
  return r;
}

Potential gauge_action(const GaugeMap& h, const Potential& mu, const Grid& grid, const GaugeOptions& opts) {
  if (h.n() != mu.n()) throw SizeMismatch("gauge_action: gauge and potential sizes differ");
  if (h.kind() == GaugeMap::Kind::kUniton) {
    const AdmissibilityReport r = uniton_admissibility(h, mu, grid);
    if (r.max_defect > opts.admissibility_rel_tol * std::max(1.0, r.scale)) {
      throw AdmissibilityError("gauge_action: pi^perp mu_{-1} pi = " + text::sci(r.max_defect) +
                               " at grid node (" + std::to_string(r.argmax_i) + ", " +
                               std::to_string(r.argmax_j) + ")");
    }
  }
  const bool dzbar = mu.has_dzbar() || h.kind() == GaugeMap::Kind::kUniton;
  Potential::Binder binder = [h, mu](std::vector<Complex> lambdas) -> PointEvaluator {
    PointEvaluator base = mu.bind(lambdas);
    GaugeMap::JetEvaluator jet_ev = h.bind(lambdas);
    auto jet = std::make_shared<GaugeMap::Jet>();
    return [base = std::move(base), jet_ev = std::move(jet_ev), jet](
               Complex z, std::span<ComplexMatrix> xi, std::span<ComplexMatrix> zeta) {
      base(z, xi, zeta);
      jet_ev(z, *jet);
      for (std::size_t s = 0; s < xi.size(); ++s) {
        Eigen::PartialPivLU<ComplexMatrix> lu(jet->value[s]);
        const ComplexMatrix hinv = lu.inverse();
        const ComplexMatrix& hv = jet->value[s];
        xi[s] = hv * xi[s] * hinv - jet->dz[s] * hinv;
        zeta[s] = hv * zeta[s] * hinv - jet->dzbar[s] * hinv;
      }
    };
  };
  const std::string label =
      std::string(h.kind() == GaugeMap::Kind::kUniton ? "uniton" : "plus") + " gauge of " + mu.label();
  return Potential(mu.n(), Potential::Kind::kGauged, dzbar, std::move(binder), label);
}

HatMembership hat_membership(const Potential& mu, const Grid& grid, int trunc) {
  HatMembership out;
  const auto lambdas = circle_points(4 * trunc);
  const PointEvaluator ev = mu.bind(lambdas);
  std::vector<ComplexMatrix> xi(lambdas.size()), zeta(lambdas.size());
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      ev(grid.z(i, j), xi, zeta);
      out.lambda_minus_two = std::max(out.lambda_minus_two, recover_symmetric(xi, trunc).mass_outside(-1, trunc));
      if (mu.has_dzbar()) {
        out.dzbar_negative = std::max(out.dzbar_negative, recover_symmetric(zeta, trunc).mass_outside(0, trunc));
      }
    }
  }
  return out;
}

double flatness_residual(const Potential& mu, const Grid& grid, int lambda_samples) {
  // Polynomial potentials are holomorphic with no dzbar part: flat exactly.
  if (mu.kind() == Potential::Kind::kPolynomial && !mu.has_dzbar()) return 0.0;
  const auto lambdas = circle_points(lambda_samples);
  const PointEvaluator ev = mu.bind(lambdas);
  const std::size_t s_count = lambdas.size();
  const std::size_t nodes = static_cast<std::size_t>(grid.size());
  std::vector<ComplexMatrix> xi(nodes * s_count), zeta(nodes * s_count);
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      const std::size_t base = static_cast<std::size_t>(grid.index(i, j)) * s_count;
      ev(grid.z(i, j), std::span(xi).subspan(base, s_count), std::span(zeta).subspan(base, s_count));
    }
  }
  const double h = grid.h();
  double worst = 0.0;
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      if (!grid.interior(i, j, kStencilMargin)) continue;
      for (std::size_t s = 0; s < s_count; ++s) {
        auto xi_at = [&](int a, int b) -> const ComplexMatrix& {
          return xi[static_cast<std::size_t>(grid.index(a, b)) * s_count + s];
        };
        auto zeta_at = [&](int a, int b) -> const ComplexMatrix& {
          return zeta[static_cast<std::size_t>(grid.index(a, b)) * s_count + s];
        };
        const ComplexMatrix& x = xi_at(i, j);
        const ComplexMatrix& y = zeta_at(i, j);
        const ComplexMatrix r = fd_dzbar(xi_at, i, j, h) - fd_dz(zeta_at, i, j, h) - (x * y - y * x);
        worst = std::max(worst, r.norm());
      }
    }
  }
  return worst;
}

}  // namespace loopmaps
