#include "loopmaps/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "loopmaps/demos.hpp"
#include "loopmaps/dressing.hpp"

namespace loopmaps {

namespace {

using io::Json;

class Checks {
 public:
  explicit Checks(const Grid& g) : grid_(g) {}

  /// A statistic over no nodes (grid too small for the stencil) fails.
  void stat(const std::string& name, const DefectStat& s, double threshold) {
    Json j = io::stat_to_json(s, grid_);
    finish(name, std::move(j), s.count > 0 ? s.max : std::numeric_limits<double>::quiet_NaN(), threshold);
  }

  void value(const std::string& name, double v, double threshold) { finish(name, {{"value", v}}, v, threshold); }

  void flag(const std::string& name, bool ok) {
    items_[name] = {{"passed", ok}};
    passed_ = passed_ && ok;
  }

  bool passed() const { return passed_; }
  Json json() const { return items_; }

 private:
  void finish(const std::string& name, Json j, double v, double threshold) {
    const bool ok = std::isfinite(v) && v < threshold;
    j["threshold"] = threshold;
    j["passed"] = ok;
    items_[name] = std::move(j);
    passed_ = passed_ && ok;
  }

  Grid grid_;
  Json items_ = Json::object();
  bool passed_ = true;
};

struct Context {
  const ExperimentConfig& cfg;
  bool want_fields;
  Checks checks;
  Json info = Json::object();
  std::vector<std::pair<std::string, std::string>> files;

  Context(const ExperimentConfig& c, bool w) : cfg(c), want_fields(w), checks(c.grid) {}

  void file(const std::string& name, const std::string& contents) {
    if (want_fields) files.emplace_back(name, contents);
  }
  void file(const std::string& name, const Json& j) {
    if (want_fields) files.emplace_back(name, j.dump() + "\n");
  }
};

DpwOptions dpw_options(const ExperimentConfig& cfg) {
  DpwOptions o;
  o.trunc = cfg.trunc;
  o.iwasawa.tol = cfg.tol.membership;
  return o;
}

Json integration_json(const IntegrationReport& r) {
  return {{"exact", r.exact},
          {"max_substeps", r.max_substeps},
          {"max_local_error", r.max_local_error},
          {"holonomy_defect", r.holonomy_defect},
          {"aliasing", r.aliasing},
          {"basepoint", r.basepoint}};
}

DefectStat involution_stat(const MapField& phi, const ComplexMatrix& q0) {
  return cartan_invert(phi, q0, std::numeric_limits<double>::infinity()).involution;
}

ExtendedSolution solve(Context& ctx, const Potential& mu) {
  ExtendedSolution sol = extended_solution(mu, ctx.cfg.grid, dpw_options(ctx.cfg));
  ctx.checks.stat("iwasawa.round_trip", sol.round_trip, ctx.cfg.tol.membership);
  ctx.checks.stat("iwasawa.unitarity", sol.unitarity, ctx.cfg.tol.membership);
  ctx.checks.stat("iwasawa.purity", sol.purity, ctx.cfg.tol.membership);
  ctx.info["integration"] = integration_json(sol.integration);
  return sol;
}

void cmd_run(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const ExtendedSolution sol = solve(ctx, cfg.mu);
  const MapField phi = harmonic_map(sol.phi);
  const MapField ap = alpha_prime(sol.b, cfg.mu);
  const ExtendedSolutionReport ext = verify_extended_solution(sol.phi, &ap);
  ctx.checks.stat("extended.support", ext.support, cfg.tol.extended);
  ctx.checks.stat("extended.structural", ext.structural, cfg.tol.extended);
  ctx.checks.stat("extended.conjugacy", ext.conjugacy, cfg.tol.extended);
  ctx.checks.stat("alpha_prime", ext.alpha, cfg.tol.alpha);
  ctx.checks.stat("harmonic", verify_harmonic(phi), cfg.tol.harmonic);
  if (cfg.finite_type && cfg.finite_type->q0) {
    ctx.checks.stat("cartan.involution", involution_stat(phi, *cfg.finite_type->q0), cfg.tol.cartan);
  }
  ctx.file("Psi.json", io::loop_field_to_json(sol.psi));
  ctx.file("Phi.json", io::loop_field_to_json(sol.phi));
  ctx.file("b.json", io::loop_field_to_json(sol.b));
  ctx.file("phi.csv", io::map_field_csv(phi));
}

PolynomialFrame uniton_frame(const ExperimentConfig& cfg) {
  if (cfg.uniton.frame) return *cfg.uniton.frame;
  const ComplexMatrix l0 = ker_minus_part(*cfg.finite_type, cfg.uniton.kernel);
  if (l0.cols() == 0) throw RankError("uniton: the kernel of eta^-_{-d} is trivial for this potential");
  return PolynomialFrame({l0});
}

double projection_distance(const SubbundleField& a, const SubbundleField& b) {
  double d = 0.0;
  for (std::size_t q = 0; q < a.projections.size(); ++q) d = std::max(d, (a.projections[q] - b.projections[q]).norm());
  return d;
}

void cmd_uniton(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const PolynomialFrame frame = uniton_frame(cfg);
  const ExtendedSolution base = solve(ctx, cfg.mu);
  GaugeOptions go;
  go.admissibility_rel_tol = cfg.tol.membership;
  const Potential moved = gauge_action(GaugeMap::uniton(frame), cfg.mu, cfg.grid, go);
  const ExtendedSolution lhs = extended_solution(moved, cfg.grid, dpw_options(cfg));

  const SubbundleField ell = subbundle_from_frame(frame, cfg.grid);
  const SubbundleField hat = apply_b0(ell, base.b);
  const auto [i0, j0] = cfg.grid.origin();
  UnitonOptions uo;
  uo.check = false;
  const LoopField rhs = add_uniton(base.phi, hat, hat.at(i0, j0), uo);
  ctx.checks.value("distance", field_distance(lhs.phi, rhs), cfg.tol.distance);

  const UnitonReport uc = uniton_condition_check(hat, harmonic_map(base.phi));
  ctx.checks.stat("uniton.holomorphic", uc.holomorphic, cfg.tol.uniton);
  ctx.checks.stat("uniton.antiholomorphic", uc.antiholomorphic, cfg.tol.uniton);

  const ConverseUniton conv = converse_uniton(hat, base.b, cfg.mu);
  ctx.checks.stat("converse.dbar", conv.dbar, cfg.tol.uniton);
  ctx.checks.stat("converse.admissibility", conv.admissibility, cfg.tol.uniton);
  ctx.checks.value("converse.round_trip", projection_distance(apply_b0(conv.ell, base.b), hat), cfg.tol.distance);
  ctx.info["rank"] = frame.rank();

  ctx.file("Phi_gauged.json", io::loop_field_to_json(lhs.phi));
  ctx.file("Phi_uniton.json", io::loop_field_to_json(rhs));
  ctx.file("hat.csv", io::subbundle_csv(hat));
}

void cmd_gauss(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  SubbundleField psi;
  ComplexMatrix q0 = identity(cfg.n);
  if (cfg.gauss.frame) {
    psi = subbundle_from_frame(*cfg.gauss.frame, cfg.grid);
  } else {
    q0 = *cfg.finite_type->q0;
    const ExtendedSolution sol = solve(ctx, cfg.mu);
    const CartanInverse inv = cartan_invert(harmonic_map(sol.phi), q0, cfg.tol.cartan);
    ctx.checks.stat("cartan.involution", inv.involution, cfg.tol.cartan);
    psi = inv.psi;
  }
  ctx.checks.stat("identity", derivative_identity_check(psi, cartan_embed(psi, q0)), cfg.tol.identity);
  ctx.checks.stat("duality", adjoint_duality_defect(psi), cfg.tol.duality);
  ctx.file("psi.csv", io::subbundle_csv(psi));

  const std::vector<GaussBundle> seq = gauss_sequence(psi, cfg.gauss.direction, cfg.gauss.steps, cfg.tol.rank);
  Json steps = Json::array();
  for (std::size_t k = 0; k < seq.size(); ++k) {
    const GaussBundle& g = seq[k];
    steps.push_back({{"step", static_cast<int>(k + 1)},
                     {"generic_rank", g.generic_rank},
                     {"rank_drops", g.rank_drops},
                     {"sigma_max", g.sigma_max},
                     {"min_generic_sigma", g.min_generic_sigma}});
    const std::string stem = "gauss_" + std::to_string(k + 1);
    ctx.file(stem + ".csv", io::subbundle_csv(g.bundle));
    ctx.file(stem + ".json", io::subbundle_to_json(g.bundle));
  }
  ctx.info["direction"] = cfg.gauss.direction;
  ctx.info["psi_rank"] = psi.rank;
  ctx.info["psi_flagged"] = psi.flag_count();
  ctx.info["steps"] = std::move(steps);
}

void cmd_dress(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const DressingBlock& d = cfg.dressing;
  const ExtendedSolution base = solve(ctx, cfg.mu);
  if (d.kind == "plus") {
    std::vector<GaugeMap> gauges;
    if (d.h) {
      gauges.push_back(*d.h);
    } else {
      std::mt19937_64 rng(cfg.seed);
      for (int k = 0; k < d.count; ++k) gauges.push_back(demos::random_plus_gauge(rng, cfg.n, d.scale, cfg.trunc));
    }
    Json distances = Json::array();
    double worst = 0.0;
    for (std::size_t k = 0; k < gauges.size(); ++k) {
      const LoopField dressed = dress_plus(gauges[k].loop_at(0.0, cfg.trunc), base.phi, dpw_options(cfg).iwasawa);
      const ExtendedSolution moved = extended_solution(gauge_action(gauges[k], cfg.mu, cfg.grid), cfg.grid, dpw_options(cfg));
      const double dist = field_distance(dressed, moved.phi);
      distances.push_back(dist);
      worst = std::max(worst, dist);
      if (k == 0) ctx.file("Phi_dressed.json", io::loop_field_to_json(dressed));
    }
    ctx.checks.value("distance", worst, cfg.tol.distance);
    ctx.info["distances"] = std::move(distances);
  } else {
    SimpleDressingOptions so;
    so.tol = cfg.tol.membership;
    const SimpleDressing sd = dress_simple(simple_factor(d.a, *d.v), base.phi, so);
    ctx.checks.stat("simple.residue", sd.residue, cfg.tol.membership);
    ctx.checks.stat("simple.out_of_band", sd.out_of_band, cfg.tol.membership);
    ctx.checks.stat("simple.unitarity", sd.unitarity, cfg.tol.membership);
    const ExtendedSolutionReport ext = verify_extended_solution(sd.phi);
    ctx.checks.stat("extended.support", ext.support, cfg.tol.extended);
    ctx.checks.stat("extended.structural", ext.structural, cfg.tol.extended);
    const MapField phi = harmonic_map(sd.phi);
    ctx.checks.stat("harmonic", verify_harmonic(phi), cfg.tol.harmonic);
    ctx.info["a"] = io::complex_to_json(d.a);
    ctx.file("Phi_dressed.json", io::loop_field_to_json(sd.phi));
    ctx.file("phi.csv", io::map_field_csv(phi));
  }
}

void cmd_complete(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const CompletionReport rep = completion_limit_experiment(cfg.mu, *cfg.dressing.v, cfg.grid, dpw_options(cfg),
                                                           cfg.dressing.a_sequence, cfg.tol.completion_ratio);
  Json steps = Json::array();
  for (const CompletionStep& s : rep.steps) steps.push_back({{"a", s.a}, {"delta", s.delta}, {"Delta", s.Delta}});
  ctx.checks.flag("monotone", rep.monotone);
  ctx.checks.value("delta_ratio", rep.delta_ratio, cfg.tol.completion_ratio);
  ctx.checks.value("Delta_ratio", rep.Delta_ratio, cfg.tol.completion_ratio);
  ctx.file("experiment.json", steps);
  ctx.info["steps"] = std::move(steps);
}

void cmd_verify(Context& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  std::ifstream in(*cfg.verify_input);
  if (!in) throw ConfigError("cannot read " + *cfg.verify_input);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError(*cfg.verify_input + ": " + e.what());
  }
  const LoopField phi = io::loop_field_from_json(j, *cfg.verify_input, cfg.trunc);
  DefectStat unitarity, basedness;
  for (int jj = 0; jj < phi.grid.samples; ++jj) {
    for (int i = 0; i < phi.grid.samples; ++i) {
      const LaurentLoop& l = phi.at(i, jj);
      const int n = l.n();
      double u = 0.0;
      for (const ComplexMatrix& v : circle_sample(l, 4 * std::max(l.trunc(), 1))) {
        u = std::max(u, (v.adjoint() * v - identity(n)).norm());
      }
      unitarity.add(u, i, jj);
      basedness.add((l.eval(1.0) - identity(n)).norm(), i, jj);
    }
  }
  Checks checks(phi.grid);
  checks.stat("unitarity", unitarity, cfg.tol.membership);
  checks.stat("basedness", basedness, cfg.tol.membership);
  const ExtendedSolutionReport ext = verify_extended_solution(phi);
  checks.stat("extended.support", ext.support, cfg.tol.extended);
  checks.stat("extended.structural", ext.structural, cfg.tol.extended);
  checks.stat("extended.conjugacy", ext.conjugacy, cfg.tol.extended);
  const MapField map = harmonic_map(phi);
  checks.stat("harmonic", verify_harmonic(map), cfg.tol.harmonic);
  if (cfg.q0) checks.stat("cartan.involution", involution_stat(map, *cfg.q0), cfg.tol.cartan);
  ctx.checks = checks;
  ctx.info["grid"] = io::grid_to_json(phi.grid);
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const FactorizationError*>(&e)) return "factorization";
  if (dynamic_cast<const TruncationError*>(&e)) return "truncation";
  if (dynamic_cast<const AdmissibilityError*>(&e)) return "admissibility";
  if (dynamic_cast<const RankError*>(&e)) return "rank";
  if (dynamic_cast<const DomainError*>(&e)) return "domain";
  if (dynamic_cast<const SizeMismatch*>(&e)) return "size";
  return "numerical";
}

}  // namespace

CommandResult run_command(const std::string& command, const ExperimentConfig& cfg, bool want_fields) {
  Context ctx(cfg, want_fields);
  CommandResult out;
  Json setup = {{"n", cfg.n}, {"grid", io::grid_to_json(cfg.grid)}, {"trunc", cfg.trunc}, {"seed", cfg.seed}};
  if (cfg.demo) setup["demo"] = *cfg.demo;
  out.report = {{"command", command}, {"schema", io::kSchemaVersion}, {"setup", setup}};
  try {
    if (command == "run") {
      cmd_run(ctx);
    } else if (command == "uniton") {
      cmd_uniton(ctx);
    } else if (command == "gauss") {
      cmd_gauss(ctx);
    } else if (command == "dress") {
      cmd_dress(ctx);
    } else if (command == "complete") {
      cmd_complete(ctx);
    } else if (command == "verify") {
      cmd_verify(ctx);
    } else {
      throw ConfigError("unknown command \"" + command + "\"");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    out.report["status"] = "error";
    out.report["passed"] = false;
    out.report["error"] = {{"type", error_type(e)}, {"message", e.what()}};
    out.exit_code = kExitNumerical;
    return out;
  }
  const bool passed = ctx.checks.passed();
  out.report["status"] = passed ? "ok" : "failed";
  out.report["passed"] = passed;
  out.report["checks"] = ctx.checks.json();
  out.report["info"] = std::move(ctx.info);
  out.files = std::move(ctx.files);
  out.exit_code = passed ? kExitOk : kExitNumerical;
  return out;
}

std::string report_text(const Json& report) { return report.dump(2) + "\n"; }

}  // namespace loopmaps
