#include "loopmaps/grassmann.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <string>

#include "text.hpp"

namespace loopmaps {

namespace {

int dim(const ComplexMatrix& m) { return static_cast<int>(m.rows()); }

// Orthonormal frame of the range of a Hermitian projection.
ComplexMatrix range_frame(const ComplexMatrix& p) { return svd_image(p, 0.5).frame; }

bool has_stencil(const Grid& g, int i, int j, int margin) { return g.interior(i, j, margin); }

void require_same_grid(const Grid& a, const Grid& b, const char* who) {
  if (a.samples != b.samples || a.half_width != b.half_width || a.center != b.center) {
    throw SizeMismatch(std::string(who) + ": fields live on different grids");
  }
}

}  // namespace

MapField cartan_embed(const SubbundleField& psi, const ComplexMatrix& q0) {
  MapField out(psi.grid);
  for (std::size_t q = 0; q < psi.projections.size(); ++q) out.values[q] = q0 * reflection(psi.projections[q]);
  return out;
}

CartanInverse cartan_invert(const MapField& phi, const ComplexMatrix& q0, double tol) {
  const Grid& g = phi.grid;
  const int n = dim(q0);
  CartanInverse out;
  out.psi = SubbundleField(g, 0);
  std::vector<int> ranks(phi.values.size());
  std::map<int, int> votes;
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const auto q = static_cast<std::size_t>(g.index(i, j));
      const ComplexMatrix s = q0 * phi.values[q];
      out.involution.add((s * s - identity(n)).norm() + (s.adjoint() - s).norm(), i, j);
      const ComplexMatrix p = 0.5 * (identity(n) + s);
      out.psi.projections[q] = 0.5 * (p + p.adjoint());
      ranks[q] = static_cast<int>(std::lround(p.trace().real()));
      ++votes[ranks[q]];
    }
  }
  if (out.involution.max > tol) {
    throw DomainError("cartan_invert: Q0 phi is not a Hermitian involution (defect " +
                      text::sci(out.involution.max) + " at node (" + std::to_string(out.involution.argmax_i) +
                      ", " + std::to_string(out.involution.argmax_j) + "))");
  }
  out.psi.rank = std::max_element(votes.begin(), votes.end(), [](auto& a, auto& b) { return a.second < b.second; })
                     ->first;
  for (std::size_t q = 0; q < ranks.size(); ++q) {
    if (ranks[q] != out.psi.rank) out.psi.flags[q] |= kFlagRankDrop;
  }
  return out;
}

namespace {

struct ProjectionDerivatives {
  MapField d, dbar;
  int margin = 0;
};

// d pi and dbar pi: exact from the frame when there is one, differences otherwise.
ProjectionDerivatives projection_derivatives(const SubbundleField& psi) {
  const Grid& g = psi.grid;
  const int n = dim(psi.projections.front());
  ProjectionDerivatives out;
  out.d = MapField(g);
  out.dbar = MapField(g);
  out.margin = psi.frame ? 0 : kStencilMargin;
  auto pg = [&](int a, int b) -> const ComplexMatrix& { return psi.at(a, b); };
  const double h = g.h();
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      ComplexMatrix& d = out.d.at(i, j);
      ComplexMatrix& dbar = out.dbar.at(i, j);
      d = ComplexMatrix::Zero(n, n);
      dbar = ComplexMatrix::Zero(n, n);
      if (psi.frame) {
        try {
          const ProjectionJet jet = projection_jet(*psi.frame, g.z(i, j));
          d = jet.d_pi;
          dbar = jet.dbar_pi;
        } catch (const RankError&) {
          // the frame degenerates here; leave zero like a missing stencil
        }
        continue;
      }
      if (!has_stencil(g, i, j, out.margin)) continue;
      d = fd_dz(pg, i, j, h);
      dbar = fd_dzbar(pg, i, j, h);
    }
  }
  return out;
}

// A' and A'' of psi (complement = false) or of psi^perp (complement = true).
SecondFundamentalForms forms_from(const SubbundleField& psi, const ProjectionDerivatives& dp, bool complement) {
  const int n = dim(psi.projections.front());
  SecondFundamentalForms out;
  out.d = MapField(psi.grid);
  out.dbar = MapField(psi.grid);
  out.margin = dp.margin;
  const double sign = complement ? -1.0 : 1.0;
  for (std::size_t q = 0; q < psi.projections.size(); ++q) {
    ComplexMatrix p = psi.projections[q];
    if (complement) p = identity(n) - p;
    const ComplexMatrix perp = identity(n) - p;
    out.d.values[q] = sign * (perp * dp.d.values[q] * p);
    out.dbar.values[q] = sign * (perp * dp.dbar.values[q] * p);
  }
  return out;
}

}  // namespace

SecondFundamentalForms second_fundamental_forms(const SubbundleField& psi) {
  return forms_from(psi, projection_derivatives(psi), false);
}

DefectStat adjoint_duality_defect(const SubbundleField& psi) {
  const ProjectionDerivatives dp = projection_derivatives(psi);
  const SecondFundamentalForms a = forms_from(psi, dp, false);
  const SecondFundamentalForms c = forms_from(psi, dp, true);
  DefectStat stat;
  for (int j = 0; j < psi.grid.samples; ++j) {
    for (int i = 0; i < psi.grid.samples; ++i) {
      if (!has_stencil(psi.grid, i, j, dp.margin)) continue;
      stat.add((a.d.at(i, j) + c.dbar.at(i, j).adjoint()).norm(), i, j);
    }
  }
  return stat;
}

DefectStat derivative_identity_check(const SubbundleField& psi, const MapField& phi) {
  require_same_grid(psi.grid, phi.grid, "derivative_identity_check");
  const Grid& g = psi.grid;
  const ProjectionDerivatives dp = projection_derivatives(psi);
  const SecondFundamentalForms a = forms_from(psi, dp, false);
  const SecondFundamentalForms c = forms_from(psi, dp, true);
  auto f = [&](int x, int y) -> const ComplexMatrix& { return phi.at(x, y); };
  DefectStat stat;
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      if (!has_stencil(g, i, j, kStencilMargin)) continue;
      const ComplexMatrix lhs = 0.5 * phi.at(i, j).partialPivLu().solve(fd_dz(f, i, j, g.h()));
      stat.add((lhs + a.d.at(i, j) + c.d.at(i, j)).norm(), i, j);
    }
  }
  return stat;
}

namespace {

// Per-node SVD of form * frame with the grid-wide rank rule shared by the
// image and kernel constructions.
struct NodeSvd {
  bool valid = false;
  Eigen::VectorXd sigma;
  ComplexMatrix u, v;
};

struct RankScan {
  std::vector<NodeSvd> nodes;
  double sigma_max = 0.0;
  int generic = 0;
};

RankScan scan_ranks(const Grid& g, int margin, double rank_tol,
                    const std::function<ComplexMatrix(int, int)>& matrix_at) {
  RankScan scan;
  scan.nodes.resize(static_cast<std::size_t>(g.size()));
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      if (!has_stencil(g, i, j, margin)) continue;
      const ComplexMatrix m = matrix_at(i, j);
      NodeSvd& node = scan.nodes[static_cast<std::size_t>(g.index(i, j))];
      node.valid = true;
      if (m.cols() == 0) {
        node.sigma.resize(0);
        node.u = ComplexMatrix::Zero(m.rows(), 0);
        node.v = ComplexMatrix::Zero(0, 0);
        continue;
      }
      Eigen::JacobiSVD<ComplexMatrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
      node.sigma = svd.singularValues();
      node.u = svd.matrixU();
      node.v = svd.matrixV();
      if (node.sigma.size() > 0) scan.sigma_max = std::max(scan.sigma_max, node.sigma(0));
    }
  }
  // A form that is zero up to rounding everywhere has rank 0.
  if (scan.sigma_max <= 1e-13) return scan;
  for (auto& node : scan.nodes) {
    if (!node.valid) continue;
    int r = 0;
    for (int k = 0; k < node.sigma.size(); ++k)
      if (node.sigma(k) > rank_tol * scan.sigma_max) ++r;
    scan.generic = std::max(scan.generic, r);
  }
  return scan;
}

int node_rank(const NodeSvd& node, double threshold) {
  int r = 0;
  for (int k = 0; k < node.sigma.size(); ++k)
    if (node.sigma(k) > threshold) ++r;
  return r;
}

void finish_bundle(GaussBundle& out) {
  SubbundleField& s = out.bundle;
  out.rank_drops = s.flag_count(kFlagRankDrop);
  if (s.flag_count() == 0) return;
  if (s.flag_count() == static_cast<int>(s.flags.size())) {
    throw RankError("gauss bundle: no node of generic rank " + std::to_string(out.generic_rank));
  }
  fill_flagged(s);
}

}  // namespace

GaussBundle gauss_bundle(const SubbundleField& psi, int direction, double rank_tol) {
  if (direction != 1 && direction != -1) throw ConfigError("gauss_bundle: direction must be +1 or -1");
  const Grid& g = psi.grid;
  const int n = dim(psi.projections.front());
  const SecondFundamentalForms forms = second_fundamental_forms(psi);
  const MapField& form = direction == 1 ? forms.d : forms.dbar;
  const RankScan scan = scan_ranks(g, forms.margin, rank_tol, [&](int i, int j) { return form.at(i, j); });

  GaussBundle out;
  out.generic_rank = scan.generic;
  out.sigma_max = scan.sigma_max;
  out.bundle = SubbundleField(g, scan.generic);
  if (scan.generic == 0) {
    for (auto& p : out.bundle.projections) p = ComplexMatrix::Zero(n, n);
    return out;
  }
  const double threshold = rank_tol * scan.sigma_max;
  out.min_generic_sigma = scan.sigma_max;
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const auto q = static_cast<std::size_t>(g.index(i, j));
      const NodeSvd& node = scan.nodes[q];
      if (!node.valid) {
        out.bundle.flags[q] = kFlagNoStencil;
        continue;
      }
      if (node_rank(node, threshold) < scan.generic) {
        out.bundle.flags[q] = kFlagRankDrop;
        continue;
      }
      const ComplexMatrix u = node.u.leftCols(scan.generic);
      out.bundle.projections[q] = u * u.adjoint();
      out.min_generic_sigma = std::min(out.min_generic_sigma, node.sigma(scan.generic - 1));
    }
  }
  finish_bundle(out);
  return out;
}

std::vector<GaussBundle> gauss_sequence(const SubbundleField& psi, int direction, int steps, double rank_tol) {
  std::vector<GaussBundle> out;
  const SubbundleField* current = &psi;
  for (int step = 0; step < steps; ++step) {
    out.push_back(gauss_bundle(*current, direction, rank_tol));
    if (out.back().generic_rank == 0) break;
    current = &out.back().bundle;
  }
  return out;
}

GaussBundle kernel_subbundle(const MapField& form, const SubbundleField& domain, int margin, double rank_tol) {
  require_same_grid(form.grid, domain.grid, "kernel_subbundle");
  const Grid& g = domain.grid;
  const int n = dim(domain.projections.front());
  std::vector<ComplexMatrix> frames(static_cast<std::size_t>(g.size()));
  for (std::size_t q = 0; q < frames.size(); ++q) frames[q] = range_frame(domain.projections[q]);
  const RankScan scan = scan_ranks(g, margin, rank_tol, [&](int i, int j) {
    return ComplexMatrix(form.at(i, j) * frames[static_cast<std::size_t>(g.index(i, j))]);
  });

  GaussBundle out;
  out.generic_rank = domain.rank - scan.generic;
  out.sigma_max = scan.sigma_max;
  out.bundle = SubbundleField(g, out.generic_rank);
  const double threshold = rank_tol * scan.sigma_max;
  out.min_generic_sigma = scan.generic > 0 ? scan.sigma_max : 0.0;
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const auto q = static_cast<std::size_t>(g.index(i, j));
      const NodeSvd& node = scan.nodes[q];
      const ComplexMatrix& frame = frames[q];
      if (!node.valid) {
        out.bundle.flags[q] = kFlagNoStencil;
        continue;
      }
      if (frame.cols() != domain.rank || (scan.generic > 0 && node_rank(node, threshold) < scan.generic)) {
        out.bundle.flags[q] = kFlagRankDrop;
        continue;
      }
      const ComplexMatrix k = frame * node.v.rightCols(domain.rank - scan.generic);
      out.bundle.projections[q] = k * k.adjoint();
      if (scan.generic > 0) out.min_generic_sigma = std::min(out.min_generic_sigma, node.sigma(scan.generic - 1));
    }
  }
  if (out.generic_rank == 0) {
    for (auto& p : out.bundle.projections) p = ComplexMatrix::Zero(n, n);
    std::fill(out.bundle.flags.begin(), out.bundle.flags.end(), 0);
    return out;
  }
  finish_bundle(out);
  return out;
}

UnitonReport uniton_condition_check(const SubbundleField& hat, const MapField& phi) {
  require_same_grid(hat.grid, phi.grid, "uniton_condition_check");
  const Grid& g = hat.grid;
  const int n = dim(phi.values.front());
  const double h = g.h();
  auto f = [&](int a, int b) -> const ComplexMatrix& { return phi.at(a, b); };
  auto pg = [&](int a, int b) -> const ComplexMatrix& { return hat.at(a, b); };
  UnitonReport rep;
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const ComplexMatrix& p = hat.at(i, j);
      const ComplexMatrix& v = phi.at(i, j);
      rep.commutation.add((v * p - p * v).norm(), i, j);
      if (!has_stencil(g, i, j, kStencilMargin)) continue;
      const auto lu = v.partialPivLu();
      const ComplexMatrix az = 0.5 * lu.solve(fd_dz(f, i, j, h));
      const ComplexMatrix azbar = 0.5 * lu.solve(fd_dzbar(f, i, j, h));
      const ComplexMatrix perp = identity(n) - p;
      ComplexMatrix dbar_p;
      if (hat.frame) {
        dbar_p = projection_jet(*hat.frame, g.z(i, j)).dbar_pi;
      } else {
        dbar_p = fd_dzbar(pg, i, j, h);
      }
      rep.holomorphic.add((perp * az * p).norm(), i, j);
      rep.antiholomorphic.add((perp * (dbar_p + azbar * p)).norm(), i, j);
    }
  }
  return rep;
}

LoopField add_uniton(const LoopField& phi, const SubbundleField& hat, const std::optional<ComplexMatrix>& pi0,
                     const UnitonOptions& opts) {
  require_same_grid(phi.grid, hat.grid, "add_uniton");
  const Grid& g = phi.grid;
  const int n = phi.values.front().n();
  const int trunc = phi.values.front().trunc();
  if (opts.check) {
    const UnitonReport rep = uniton_condition_check(hat, harmonic_map(phi));
    auto refuse = [&](const char* what, const DefectStat& s) {
      throw AdmissibilityError(std::string("add_uniton: ") + what + " defect " + text::sci(s.max) +
                               " at node (" + std::to_string(s.argmax_i) + ", " + std::to_string(s.argmax_j) +
                               ") exceeds " + text::sci(opts.tol));
    };
    if (rep.holomorphic.max > opts.tol) refuse("pi^perp A_z pi", rep.holomorphic);
    if (rep.antiholomorphic.max > opts.tol) refuse("pi^perp (dbar pi + A_zbar pi)", rep.antiholomorphic);
    if (opts.grassmannian && rep.commutation.max > opts.tol) refuse("[phi, pi]", rep.commutation);
  }
  std::optional<LaurentLoop> left;
  if (pi0) {
    left = LaurentLoop::constant(*pi0, trunc) + LaurentLoop::monomial(identity(n) - *pi0, -1, trunc);
  }
  LoopField out(g);
  for (std::size_t q = 0; q < phi.values.size(); ++q) {
    const ComplexMatrix& p = hat.projections[q];
    const LaurentLoop right = LaurentLoop::constant(p, trunc) + LaurentLoop::monomial(identity(n) - p, 1, trunc);
    LaurentLoop v = loop_mul(phi.values[q], right);
    out.values[q] = left ? loop_mul(*left, v) : std::move(v);
  }
  return out;
}

SubbundleField apply_b0(const SubbundleField& ell, const LoopField& b) {
  require_same_grid(ell.grid, b.grid, "apply_b0");
  SubbundleField out(ell.grid, ell.rank);
  out.flags = ell.flags;
  for (std::size_t q = 0; q < ell.projections.size(); ++q) {
    out.projections[q] = hermitian_projection(b.values[q].coeff(0) * range_frame(ell.projections[q]));
  }
  return out;
}

ConverseUniton converse_uniton(const SubbundleField& hat, const LoopField& b, const Potential& mu) {
  require_same_grid(hat.grid, b.grid, "converse_uniton");
  const Grid& g = hat.grid;
  const int n = mu.n();
  ConverseUniton out;
  out.ell = SubbundleField(g, hat.rank);
  out.ell.flags = hat.flags;
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const auto q = static_cast<std::size_t>(g.index(i, j));
      const ComplexMatrix frame = b.values[q].coeff(0).partialPivLu().solve(range_frame(hat.projections[q]));
      const ComplexMatrix p = hermitian_projection(frame);
      out.ell.projections[q] = p;
      const ComplexMatrix m1 = mu.xi_loop(g.z(i, j), 8).coeff(-1);
      out.admissibility.add(((identity(n) - p) * m1 * p).norm(), i, j);
    }
  }
  const SecondFundamentalForms forms = second_fundamental_forms(out.ell);
  for (int j = 0; j < g.samples; ++j)
    for (int i = 0; i < g.samples; ++i)
      if (has_stencil(g, i, j, forms.margin)) out.dbar.add(forms.dbar.at(i, j).norm(), i, j);
  return out;
}

}  // namespace loopmaps
