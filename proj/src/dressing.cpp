#include "loopmaps/dressing.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "text.hpp"

namespace loopmaps {

namespace {

std::string at_node(int i, int j) { return " at grid node (" + std::to_string(i) + ", " + std::to_string(j) + ")"; }

}  // namespace

LoopField dress_plus(const LaurentLoop& h, const LoopField& phi, const IwasawaOptions& opts) {
  const Grid& g = phi.grid;
  IwasawaOptions iw = opts;
  if (iw.trunc <= 0) iw.trunc = phi.values.front().trunc();
  LoopField out(g);
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      try {
        out.at(i, j) = iwasawa_factorize(loop_mul(h, phi.at(i, j)), iw).phi;
      } catch (const FactorizationError& e) {
        throw FactorizationError(e.what() + at_node(i, j));
      } catch (const TruncationError& e) {
        throw TruncationError(e.what() + at_node(i, j));
      }
    }
  }
  return out;
}

SimpleFactor simple_factor(Complex a, const ComplexMatrix& v_frame) {
  const double r = std::abs(a);
  if (!(r > 0.0) || !(r < 1.0)) throw DomainError("simple factor: need 0 < |a| < 1, got |a| = " + text::sci(r));
  return {a, hermitian_projection(v_frame)};
}

Complex xi_a(Complex a, Complex lambda) {
  if (std::abs(lambda - a) == 0.0) throw DomainError("simple factor: evaluated at its pole lambda = a");
  return (std::conj(a) * lambda - 1.0) / (lambda - a) * ((1.0 - a) / (std::conj(a) - 1.0));
}

ComplexMatrix simple_factor_eval(const SimpleFactor& sf, Complex lambda) {
  const int n = static_cast<int>(sf.pi.rows());
  return sf.pi + xi_a(sf.a, lambda) * (identity(n) - sf.pi);
}

SimpleDressing dress_simple(const SimpleFactor& sf, const LoopField& phi, const SimpleDressingOptions& opts) {
  const Grid& g = phi.grid;
  const int n = phi.values.front().n();
  const int trunc = phi.values.front().trunc();
  const int s_count = 4 * trunc;
  const CircleSampler sampler(s_count);
  const auto& lambdas = sampler.points();
  const ComplexMatrix v = svd_image(sf.pi, 0.5).frame;
  const ComplexMatrix vperp = identity(n) - sf.pi;

  std::vector<ComplexMatrix> left(lambdas.size());
  std::vector<Complex> xi(lambdas.size());
  for (std::size_t s = 0; s < lambdas.size(); ++s) {
    left[s] = simple_factor_eval(sf, lambdas[s]);
    xi[s] = xi_a(sf.a, lambdas[s]);
  }

  SimpleDressing out;
  out.phi = LoopField(g);
  std::vector<ComplexMatrix> vals(lambdas.size());
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const LaurentLoop& p = phi.at(i, j);
      const LaurentLoop trimmed = p.trimmed(opts.trim * std::max(1.0, p.max_coeff_norm()));
      const ComplexMatrix pa = trimmed.eval(sf.a);
      Eigen::FullPivLU<ComplexMatrix> lu(pa);
      if (!lu.isInvertible()) throw FactorizationError("dress_simple: Phi(a) singular" + at_node(i, j));
      const ComplexMatrix pw = hermitian_projection(lu.solve(v));
      out.residue.add((vperp * pa * pw).norm() / std::max(1.0, pa.norm()), i, j);
      const ComplexMatrix pwperp = identity(n) - pw;
      circle_sample_into(p, sampler, vals);
      double unit = 0.0;
      for (std::size_t s = 0; s < vals.size(); ++s) {
        vals[s] = left[s] * vals[s] * (pw + pwperp / xi[s]);
        unit = std::max(unit, (vals[s].adjoint() * vals[s] - identity(n)).norm());
      }
      RecoveredLoop r = coeff_recover(vals, -trunc, trunc, trunc);
      out.out_of_band.add(r.aliasing_defect, i, j);
      out.unitarity.add(unit, i, j);
      out.phi.at(i, j) = std::move(r.loop);
    }
  }
  if (out.out_of_band.max > opts.tol || out.unitarity.max > opts.tol) {
    const DefectStat& worst = out.out_of_band.max > opts.tol ? out.out_of_band : out.unitarity;
    throw TruncationError("dress_simple: certificate failed (out of band " + text::sci(out.out_of_band.max) +
                          ", unitarity " + text::sci(out.unitarity.max) + ")" +
                          at_node(worst.argmax_i, worst.argmax_j) +
                          "; the closed form's hypotheses do not hold there");
  }
  return out;
}

namespace {

// Coefficients of g(lambda) xi(lambda) g(lambda)^{-1} at the circle samples.
LaurentLoop conjugated(const std::vector<ComplexMatrix>& g, const std::vector<ComplexMatrix>& ginv,
                       const std::vector<ComplexMatrix>& xi, int trunc) {
  std::vector<ComplexMatrix> vals(xi.size());
  for (std::size_t s = 0; s < xi.size(); ++s) vals[s] = g[s] * xi[s] * ginv[s];
  return coeff_recover(vals, -trunc, trunc, trunc, false).loop;
}

}  // namespace

CompletionReport completion_limit_experiment(const Potential& mu, const ComplexMatrix& v_frame, const Grid& grid,
                                             const DpwOptions& opts, std::vector<double> a_sequence,
                                             double ratio_threshold) {
  if (a_sequence.size() < 2) throw ConfigError("completion: need at least two values of a");
  for (double a : a_sequence) {
    if (!(a > 0.0 && a < 1.0)) throw ConfigError("completion: a must lie in (0, 1), got " + text::sci(a));
    if (a < 1e-3) throw ConfigError("completion: a below 1e-3 is not supported (Phi(a) grows like a^kmin)");
  }
  const int n = mu.n();
  const int trunc = opts.trunc;
  const GaugeMap gamma = GaugeMap::uniton(PolynomialFrame({v_frame}));
  const Potential gauged = gauge_action(gamma, mu, grid);  // AdmissibilityError on failure
  const ExtendedSolution base = extended_solution(mu, grid, opts);
  const ExtendedSolution target = extended_solution(gauged, grid, opts);

  const int s_count = 4 * trunc;
  const std::vector<Complex> lambdas = CircleSampler(s_count).points();
  const PointEvaluator ev = mu.bind(lambdas);
  std::vector<std::vector<ComplexMatrix>> xis(static_cast<std::size_t>(grid.size()));
  std::vector<LaurentLoop> gauged_loops(static_cast<std::size_t>(grid.size()));
  std::vector<ComplexMatrix> zeta(lambdas.size());
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      const auto q = static_cast<std::size_t>(grid.index(i, j));
      xis[q].resize(lambdas.size());
      ev(grid.z(i, j), xis[q], zeta);
      gauged_loops[q] = gauged.xi_loop(grid.z(i, j), trunc);
    }
  }

  CompletionReport rep;
  rep.ratio_threshold = ratio_threshold;
  for (double a : a_sequence) {
    const SimpleFactor sf = simple_factor(a, v_frame);
    std::vector<ComplexMatrix> g(lambdas.size()), ginv(lambdas.size());
    for (std::size_t s = 0; s < lambdas.size(); ++s) {
      g[s] = simple_factor_eval(sf, lambdas[s]);
      ginv[s] = sf.pi + (identity(n) - sf.pi) / xi_a(sf.a, lambdas[s]);
    }
    CompletionStep step;
    step.a = a;
    for (std::size_t q = 0; q < xis.size(); ++q) {
      step.delta = std::max(step.delta, conjugated(g, ginv, xis[q], trunc).distance(gauged_loops[q]));
    }
    step.Delta = field_distance(dress_simple(sf, base.phi).phi, target.phi);
    rep.steps.push_back(step);
  }
  rep.monotone = true;
  for (std::size_t k = 1; k < rep.steps.size(); ++k) {
    if (rep.steps[k].delta >= rep.steps[k - 1].delta || rep.steps[k].Delta >= rep.steps[k - 1].Delta) {
      rep.monotone = false;
    }
  }
  auto ratio = [](double last, double first) { return first > 0.0 ? last / first : 0.0; };
  rep.delta_ratio = ratio(rep.steps.back().delta, rep.steps.front().delta);
  rep.Delta_ratio = ratio(rep.steps.back().Delta, rep.steps.front().Delta);
  rep.passed = rep.monotone && rep.delta_ratio < ratio_threshold && rep.Delta_ratio < ratio_threshold;
  return rep;
}

}  // namespace loopmaps
