#include "loopmaps/dpw.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "text.hpp"

namespace loopmaps {

namespace {

constexpr Complex kI{0.0, 1.0};

using Samples = std::vector<ComplexMatrix>;

// Values of every node at the S lambda samples, node-major.
struct SampledField {
  Grid grid;
  int samples = 0;
  Samples values;

  SampledField(const Grid& g, int s, int n)
      : grid(g), samples(s), values(static_cast<std::size_t>(g.size()) * s, ComplexMatrix::Identity(n, n)) {}
  std::size_t offset(int i, int j) const { return static_cast<std::size_t>(grid.index(i, j)) * samples; }
  ComplexMatrix& at(int i, int j, int s) { return values[offset(i, j) + s]; }
  const ComplexMatrix& at(int i, int j, int s) const { return values[offset(i, j) + s]; }
  std::span<ComplexMatrix> node(int i, int j) { return std::span(values).subspan(offset(i, j), samples); }
  std::span<const ComplexMatrix> node(int i, int j) const {
    return std::span<const ComplexMatrix>(values).subspan(offset(i, j), samples);
  }
};

SampledField sample_field(const LoopField& f, int samples) {
  const int n = f.values.front().n();
  SampledField out(f.grid, samples, n);
  const CircleSampler sampler(samples);
  for (int j = 0; j < f.grid.samples; ++j)
    for (int i = 0; i < f.grid.samples; ++i) circle_sample_into(f.at(i, j), sampler, out.node(i, j));
  return out;
}

int sample_count(int trunc) { return 4 * std::max(trunc, 1); }

// Connection dir * xi + conj(dir) * zeta evaluated at z for every lambda sample.
class Connection {
 public:
  Connection(const Potential& mu, const std::vector<Complex>& lambdas)
      : eval_(mu.bind(lambdas)), xi_(lambdas.size()), zeta_(lambdas.size()), has_dzbar_(mu.has_dzbar()) {}

  void operator()(Complex z, Complex dir, Samples& out) {
    eval_(z, xi_, zeta_);
    out.resize(xi_.size());
    for (std::size_t s = 0; s < xi_.size(); ++s) {
      out[s] = dir * xi_[s];
      if (has_dzbar_) out[s] += std::conj(dir) * zeta_[s];
    }
  }

 private:
  PointEvaluator eval_;
  Samples xi_, zeta_;
  bool has_dzbar_;
};

// RK4 for dY/dt = Y A(z0 + t dir), t in [0, h], with m equal substeps.
void rk4_edge(Connection& conn, const Samples& y0, Complex z0, Complex dir, double h, int m, Samples& y) {
  y = y0;
  const std::size_t s_count = y0.size();
  const double dt = h / m;
  Samples a0, a1, a2, k1(s_count), k2(s_count), k3(s_count), k4(s_count);
  conn(z0, dir, a0);
  for (int step = 0; step < m; ++step) {
    const Complex z = z0 + (step * dt) * dir;
    conn(z + 0.5 * dt * dir, dir, a1);
    conn(z + dt * dir, dir, a2);
    for (std::size_t s = 0; s < s_count; ++s) {
      k1[s] = y[s] * a0[s];
      k2[s] = (y[s] + 0.5 * dt * k1[s]) * a1[s];
      k3[s] = (y[s] + 0.5 * dt * k2[s]) * a1[s];
      k4[s] = (y[s] + dt * k3[s]) * a2[s];
      y[s] += (dt / 6.0) * (k1[s] + 2.0 * k2[s] + 2.0 * k3[s] + k4[s]);
    }
    a0.swap(a2);
  }
}

double relative_gap(const Samples& a, const Samples& b) {
  double worst = 0.0;
  for (std::size_t s = 0; s < a.size(); ++s) {
    worst = std::max(worst, (a[s] - b[s]).norm() / std::max(1.0, b[s].norm()));
  }
  return worst;
}

struct EdgeIntegrator {
  Connection conn;
  const DpwOptions& opts;
  IntegrationReport& report;

  // Step doubling from one substep until the estimate passes ode_tol or the cap is hit.
  void operator()(const Samples& y0, Complex z0, Complex dir, double h, Samples& out) {
    Samples coarse, fine;
    int m = 1;
    rk4_edge(conn, y0, z0, dir, h, m, coarse);
    double err = 0.0;
    while (true) {
      rk4_edge(conn, y0, z0, dir, h, 2 * m, fine);
      err = relative_gap(coarse, fine);
      m *= 2;
      if (err <= opts.ode_tol || m >= opts.max_substeps) break;
      coarse.swap(fine);
    }
    report.max_substeps = std::max(report.max_substeps, m);
    report.max_local_error = std::max(report.max_local_error, err);
    out.swap(fine);
  }
};

void integrate_tree(const Potential& mu, const Grid& grid, const DpwOptions& opts,
                    const std::vector<Complex>& lambdas, SampledField& psi, IntegrationReport& report) {
  const auto [i0, j0] = grid.origin();
  const double h = grid.h();
  EdgeIntegrator edge{Connection(mu, lambdas), opts, report};
  Samples y0, y1;
  auto load = [&](int i, int j) { y0.assign(psi.node(i, j).begin(), psi.node(i, j).end()); };
  auto store = [&](int i, int j) { std::copy(y1.begin(), y1.end(), psi.node(i, j).begin()); };

  // Row through the origin, then every column from that row.
  for (int i = i0 + 1; i < grid.samples; ++i) {
    load(i - 1, j0);
    edge(y0, grid.z(i - 1, j0), 1.0, h, y1);
    store(i, j0);
  }
  for (int i = i0 - 1; i >= 0; --i) {
    load(i + 1, j0);
    edge(y0, grid.z(i + 1, j0), -1.0, h, y1);
    store(i, j0);
  }
  for (int i = 0; i < grid.samples; ++i) {
    for (int j = j0 + 1; j < grid.samples; ++j) {
      load(i, j - 1);
      edge(y0, grid.z(i, j - 1), kI, h, y1);
      store(i, j);
    }
    for (int j = j0 - 1; j >= 0; --j) {
      load(i, j + 1);
      edge(y0, grid.z(i, j + 1), -kI, h, y1);
      store(i, j);
    }
  }

  if (!opts.certify_holonomy) return;
  // Horizontal edges off the origin row close a plaquette with the tree.
  IntegrationReport scratch;
  EdgeIntegrator check{Connection(mu, lambdas), opts, scratch};
  for (int j = 0; j < grid.samples; ++j) {
    if (j == j0) continue;
    for (int i = 0; i + 1 < grid.samples; ++i) {
      load(i, j);
      check(y0, grid.z(i, j), 1.0, h, y1);
      Samples target(psi.node(i + 1, j).begin(), psi.node(i + 1, j).end());
      report.holonomy_defect = std::max(report.holonomy_defect, relative_gap(y1, target));
    }
  }
}

void integrate_exact(const LaurentLoop& xi, const Grid& grid, const std::vector<Complex>& lambdas,
                     SampledField& psi) {
  Samples xs;
  for (const Complex& l : lambdas) xs.push_back(xi.eval(l));
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      const Complex z = grid.z(i, j);
      auto node = psi.node(i, j);
      for (std::size_t s = 0; s < xs.size(); ++s) node[s] = matrix_exp(z * xs[s]);
    }
  }
}

std::string node_label(const Grid& g, int i, int j) {
  const Complex z = g.z(i, j);
  return " at grid node (" + std::to_string(i) + ", " + std::to_string(j) + "), z = " + text::sci(z.real()) +
         (z.imag() < 0 ? "" : "+") + text::sci(z.imag()) + "i";
}

// k-th Fourier coefficient of sampled values at the S-th roots of unity.
ComplexMatrix fourier_coefficient(std::span<const ComplexMatrix> values, const std::vector<Complex>& lambdas,
                                  int k) {
  ComplexMatrix acc = ComplexMatrix::Zero(values.front().rows(), values.front().cols());
  for (std::size_t s = 0; s < values.size(); ++s) acc += std::pow(lambdas[s], -k) * values[s];
  return acc / static_cast<double>(values.size());
}

}  // namespace

LoopField integrate_potential(const Potential& mu, const Grid& grid, const DpwOptions& opts,
                              IntegrationReport* report) {
  grid.validate();
  if (opts.trunc < 1) throw ConfigError("integrate_potential: trunc must be >= 1");
  if (opts.max_substeps < 2) throw ConfigError("integrate_potential: max_substeps must be >= 2");
  const int n = mu.n();
  const int s_count = sample_count(opts.trunc);
  const std::vector<Complex> lambdas = CircleSampler(s_count).points();
  SampledField psi(grid, s_count, n);
  IntegrationReport rep;

  const std::optional<LaurentLoop> constant = mu.constant_xi();
  if (opts.method == IntegrationMethod::kExact && !constant) {
    throw DomainError("integrate_potential: exact branch needs a constant dz part and no dzbar part");
  }
  if (constant && opts.method != IntegrationMethod::kRK4) {
    rep.exact = true;
    integrate_exact(*constant, grid, lambdas, psi);
  } else {
    integrate_tree(mu, grid, opts, lambdas, psi, rep);
  }

  LoopField out(grid);
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      RecoveredLoop r = coeff_recover(psi.node(i, j), -opts.trunc, opts.trunc, opts.trunc);
      rep.aliasing = std::max(rep.aliasing, r.aliasing_defect);
      out.at(i, j) = std::move(r.loop);
    }
  }
  const auto [i0, j0] = grid.origin();
  rep.basepoint = out.at(i0, j0).distance(LaurentLoop::identity(n, opts.trunc));
  if (report) *report = rep;
  return out;
}

ExtendedSolution extended_solution(const Potential& mu, const Grid& grid, const DpwOptions& opts) {
  ExtendedSolution sol;
  sol.psi = integrate_potential(mu, grid, opts, &sol.integration);
  sol.phi = LoopField(grid);
  sol.b = LoopField(grid);
  IwasawaOptions iw = opts.iwasawa;
  if (iw.trunc <= 0) iw.trunc = opts.trunc;
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      IwasawaFactors f;
      try {
        f = iwasawa_factorize(sol.psi.at(i, j), iw);
      } catch (const FactorizationError& e) {
        throw FactorizationError(e.what() + node_label(grid, i, j));
      } catch (const TruncationError& e) {
        throw TruncationError(e.what() + node_label(grid, i, j));
      }
      sol.round_trip.add(f.diagnostics.round_trip, i, j);
      sol.unitarity.add(f.diagnostics.unitarity, i, j);
      sol.purity.add(f.diagnostics.purity, i, j);
      sol.phi.at(i, j) = std::move(f.phi);
      sol.b.at(i, j) = std::move(f.b);
    }
  }
  return sol;
}

MapField harmonic_map(const LoopField& phi, Complex lambda) {
  return evaluate_at(phi, lambda);
}

MapField alpha_prime(const LoopField& b, const Potential& mu) {
  const Grid& grid = b.grid;
  const int trunc = std::max(b.values.front().trunc(), 1);
  const std::vector<Complex> lambdas = CircleSampler(sample_count(trunc)).points();
  const PointEvaluator ev = mu.bind(lambdas);
  Samples xi(lambdas.size()), zeta(lambdas.size());
  MapField out(grid);
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      ev(grid.z(i, j), xi, zeta);
      const ComplexMatrix xi_m1 = fourier_coefficient(xi, lambdas, -1);
      const ComplexMatrix b0 = b.at(i, j).coeff(0);
      Eigen::PartialPivLU<ComplexMatrix> lu(b0);
      if (std::abs(lu.determinant()) < 1e-14 * std::pow(std::max(1.0, b0.norm()), b0.rows())) {
        throw FactorizationError("alpha_prime: b_0 singular" + node_label(grid, i, j));
      }
      out.at(i, j) = -b0 * xi_m1 * lu.inverse();
    }
  }
  return out;
}

ExtendedSolutionReport verify_extended_solution(const LoopField& phi, const MapField* alpha_prime) {
  const Grid& grid = phi.grid;
  const int trunc = std::max(phi.values.front().trunc(), 1);
  const int s_count = sample_count(trunc);
  const SampledField sp = sample_field(phi, s_count);
  const double h = grid.h();
  ExtendedSolutionReport rep;
  Samples l(static_cast<std::size_t>(s_count)), lbar(static_cast<std::size_t>(s_count));
  const int lo = -s_count / 2 + 1;
  const int hi = s_count / 2;
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      if (!grid.interior(i, j, kStencilMargin)) continue;
      for (int s = 0; s < s_count; ++s) {
        auto f = [&](int a, int c) -> const ComplexMatrix& { return sp.at(a, c, s); };
        Eigen::PartialPivLU<ComplexMatrix> lu(sp.at(i, j, s));
        l[static_cast<std::size_t>(s)] = lu.solve(fd_dz(f, i, j, h));
        lbar[static_cast<std::size_t>(s)] = lu.solve(fd_dzbar(f, i, j, h));
      }
      const LaurentLoop lc = coeff_recover(l, lo, hi, hi, false).loop;
      const LaurentLoop lbc = coeff_recover(lbar, lo, hi, hi, false).loop;
      rep.support.add(std::hypot(lc.mass_outside(-1, 0), lbc.mass_outside(0, 1)), i, j);
      rep.structural.add((lc.coeff(0) + lc.coeff(-1)).norm() + (lbc.coeff(0) + lbc.coeff(1)).norm(), i, j);
      rep.conjugacy.add((lbc.coeff(0) + lc.coeff(0).adjoint()).norm(), i, j);
      if (alpha_prime) rep.alpha.add((lc.coeff(-1) + alpha_prime->at(i, j)).norm(), i, j);
    }
  }
  return rep;
}

DefectStat holomorphic_structure_defect(const LoopField& b, const MapField& alpha_prime, const Potential& mu) {
  const Grid& grid = b.grid;
  const int trunc = std::max(b.values.front().trunc(), 1);
  const int s_count = sample_count(trunc);
  const std::vector<Complex> lambdas = CircleSampler(s_count).points();
  const SampledField sb = sample_field(b, s_count);
  const PointEvaluator ev = mu.bind(lambdas);
  Samples xi(lambdas.size()), zeta(lambdas.size());
  const double h = grid.h();
  DefectStat stat;
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      if (!grid.interior(i, j, kStencilMargin)) continue;
      ev(grid.z(i, j), xi, zeta);
      const ComplexMatrix a2 = -alpha_prime.at(i, j).adjoint();
      double worst = 0.0;
      for (int s = 0; s < s_count; ++s) {
        auto f = [&](int a, int c) -> const ComplexMatrix& { return sb.at(a, c, s); };
        const ComplexMatrix& bv = sb.at(i, j, s);
        const auto su = static_cast<std::size_t>(s);
        ComplexMatrix r = fd_dzbar(f, i, j, h) + (1.0 - lambdas[su]) * a2 * bv;
        if (mu.has_dzbar()) r -= bv * zeta[su];
        worst = std::max(worst, r.norm());
      }
      stat.add(worst, i, j);
    }
  }
  return stat;
}

DefectStat verify_harmonic(const MapField& phi) {
  const Grid& grid = phi.grid;
  const double h = grid.h();
  const int n = static_cast<int>(phi.values.front().rows());
  MapField p(grid), q(grid);
  auto f = [&](int a, int c) -> const ComplexMatrix& { return phi.at(a, c); };
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      if (!grid.interior(i, j, kStencilMargin)) {
        p.at(i, j) = ComplexMatrix::Zero(n, n);
        q.at(i, j) = ComplexMatrix::Zero(n, n);
        continue;
      }
      Eigen::PartialPivLU<ComplexMatrix> lu(phi.at(i, j));
      p.at(i, j) = lu.solve(fd_dz(f, i, j, h));
      q.at(i, j) = lu.solve(fd_dzbar(f, i, j, h));
    }
  }
  auto pg = [&](int a, int c) -> const ComplexMatrix& { return p.at(a, c); };
  auto qg = [&](int a, int c) -> const ComplexMatrix& { return q.at(a, c); };
  DefectStat stat;
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      if (!grid.interior(i, j, 2 * kStencilMargin)) continue;
      stat.add((fd_dzbar(pg, i, j, h) + fd_dz(qg, i, j, h)).norm(), i, j);
    }
  }
  return stat;
}

}  // namespace loopmaps
