#include "loopmaps/config.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "loopmaps/demos.hpp"

namespace loopmaps {

namespace {

using io::Json;

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw ConfigError(where + ": " + what); }

double positive(const Json& j, const std::string& where) {
  if (!j.is_number() || !(j.get<double>() > 0.0)) bad(where, "expected a positive number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

std::string string(const Json& j, const std::string& where) {
  if (!j.is_string()) bad(where, "expected a string");
  return j.get<std::string>();
}

void parse_tolerances(const Json& j, Tolerances& t) {
  io::require_keys(j, {"membership", "extended", "alpha", "harmonic", "uniton", "distance", "cartan", "identity",
                       "duality", "rank", "completion_ratio"},
                   "tolerances");
  auto set = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = positive(j[key], std::string("tolerances.") + key);
  };
  set("membership", t.membership);
  set("extended", t.extended);
  set("alpha", t.alpha);
  set("harmonic", t.harmonic);
  set("uniton", t.uniton);
  set("distance", t.distance);
  set("cartan", t.cartan);
  set("identity", t.identity);
  set("duality", t.duality);
  set("rank", t.rank);
  set("completion_ratio", t.completion_ratio);
}

double* headline(Tolerances& t, const std::string& command) {
  if (command == "run" || command == "verify") return &t.harmonic;
  if (command == "uniton" || command == "dress") return &t.distance;
  if (command == "gauss") return &t.identity;
  if (command == "complete") return &t.completion_ratio;
  return nullptr;
}

void apply_demo(const std::string& name, ExperimentConfig& c) {
  const auto names = demos::finite_type_names();
  if (std::find(names.begin(), names.end(), name) != names.end()) {
    c.finite_type = demos::finite_type_by_name(name, c.trunc);
    c.mu = c.finite_type->potential();
  } else if (name == "pt_pair") {
    demos::UnitonPair p = demos::pt_pair(c.trunc);
    c.mu = p.mu;
    c.uniton.frame = p.ell;
  } else if (name == "completion") {
    demos::CompletionSetup s = demos::completion(c.trunc);
    c.mu = s.mu;
    c.dressing.v = s.v;
  } else {
    std::string all;
    for (const auto& n : names) all += n + ", ";
    bad("demo", "unknown demo \"" + name + "\" (known: " + all + "pt_pair, completion)");
  }
}

void parse_uniton(const Json& j, ExperimentConfig& c) {
  io::require_keys(j, {"frame", "kernel"}, "uniton");
  if (j.contains("frame")) c.uniton.frame = io::frame_from_json(j["frame"], "uniton.frame");
  if (j.contains("kernel")) {
    const std::string k = string(j["kernel"], "uniton.kernel");
    if (k == "morphism") {
      c.uniton.kernel = KernelDomain::kMorphism;
    } else if (k == "full") {
      c.uniton.kernel = KernelDomain::kFullSpace;
    } else {
      bad("uniton.kernel", "expected \"morphism\" or \"full\"");
    }
  }
}

void parse_dressing(const Json& j, ExperimentConfig& c) {
  io::require_keys(j, {"kind", "h", "count", "scale", "a", "V", "a_sequence"}, "dressing");
  DressingBlock& d = c.dressing;
  if (j.contains("kind")) {
    d.kind = string(j["kind"], "dressing.kind");
    if (d.kind != "plus" && d.kind != "simple") bad("dressing.kind", "expected \"plus\" or \"simple\"");
  }
  if (j.contains("h")) {
    io::require_keys(j["h"], {"terms"}, "dressing.h");
    const Json& terms = j["h"].contains("terms") ? j["h"]["terms"] : Json::array();
    if (!terms.is_array() || terms.empty()) bad("dressing.h.terms", "expected a non-empty list");
    std::vector<PotentialTerm> ts;
    for (std::size_t q = 0; q < terms.size(); ++q) {
      const std::string w = "dressing.h.terms[" + std::to_string(q) + "]";
      io::require_keys(terms[q], {"zpow", "loop"}, w);
      if (!terms[q].contains("zpow") || !terms[q].contains("loop")) bad(w, "needs zpow and loop");
      ts.push_back({integer(terms[q]["zpow"], w + ".zpow"), io::loop_from_json(terms[q]["loop"], w + ".loop", c.trunc)});
    }
    try {
      d.h = GaugeMap::plus(std::move(ts));
    } catch (const Error& e) {
      bad("dressing.h", e.what());
    }
  }
  if (j.contains("count")) {
    d.count = integer(j["count"], "dressing.count");
    if (d.count < 1) bad("dressing.count", "must be positive");
  }
  if (j.contains("scale")) d.scale = positive(j["scale"], "dressing.scale");
  if (j.contains("a")) d.a = io::complex_from_json(j["a"], "dressing.a");
  if (j.contains("V")) d.v = io::matrix_from_json(j["V"], "dressing.V");
  if (j.contains("a_sequence")) {
    const Json& s = j["a_sequence"];
    if (!s.is_array() || s.size() < 2) bad("dressing.a_sequence", "expected at least two numbers");
    d.a_sequence.clear();
    for (const Json& a : s) d.a_sequence.push_back(positive(a, "dressing.a_sequence"));
  }
}

void parse_gauss(const Json& j, ExperimentConfig& c) {
  io::require_keys(j, {"direction", "steps", "frame"}, "gauss");
  if (j.contains("direction")) {
    c.gauss.direction = integer(j["direction"], "gauss.direction");
    if (c.gauss.direction != 1 && c.gauss.direction != -1) bad("gauss.direction", "expected 1 or -1");
  }
  if (j.contains("steps")) {
    c.gauss.steps = integer(j["steps"], "gauss.steps");
    if (c.gauss.steps < 1) bad("gauss.steps", "must be positive");
  }
  if (j.contains("frame")) c.gauss.frame = io::frame_from_json(j["frame"], "gauss.frame");
}

int size_of(const ExperimentConfig& c, const std::string& command) {
  if (command == "gauss" && c.gauss.frame) return static_cast<int>(c.gauss.frame->coeffs().front().rows());
  return c.mu.n();
}

}  // namespace

ExperimentConfig parse_config(const Json& j, const std::string& command, const Overrides& ov) {
  const std::vector<std::string> commands{"run", "uniton", "gauss", "dress", "complete", "verify"};
  if (std::find(commands.begin(), commands.end(), command) == commands.end()) bad("command", "unknown \"" + command + "\"");
  io::require_keys(j, {"schema", "n", "grid", "trunc", "seed", "tolerances", "demo", "potential", "uniton", "dressing",
                       "gauss", "verify"},
                   "config");
  if (j.contains("schema") && (!j["schema"].is_number_integer() || j["schema"].get<int>() != io::kSchemaVersion)) {
    bad("schema", "unsupported version (expected " + std::to_string(io::kSchemaVersion) + ")");
  }
  ExperimentConfig c;
  if (j.contains("grid")) c.grid = io::grid_from_json(j["grid"], "grid");
  if (ov.grid) c.grid.samples = *ov.grid;
  c.grid.validate();
  if (j.contains("trunc")) c.trunc = integer(j["trunc"], "trunc");
  if (ov.trunc) c.trunc = *ov.trunc;
  if (c.trunc < 2 || c.trunc > 256) bad("trunc", "must lie in [2, 256]");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned()) bad("seed", "expected a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (ov.seed) c.seed = *ov.seed;
  if (j.contains("tolerances")) parse_tolerances(j["tolerances"], c.tol);
  if (ov.tol) {
    if (!(*ov.tol > 0.0)) bad("--tol", "must be positive");
    if (double* slot = headline(c.tol, command)) *slot = *ov.tol;
  }

  if (j.contains("demo") && j.contains("potential")) bad("config", "give either demo or potential, not both");
  if (j.contains("demo")) {
    c.demo = string(j["demo"], "demo");
    apply_demo(*c.demo, c);
  }
  if (j.contains("potential")) {
    io::PotentialSpec spec = io::potential_from_json(j["potential"], "potential", c.trunc);
    c.mu = std::move(spec.mu);
    c.finite_type = std::move(spec.finite_type);
  }
  if (j.contains("uniton")) parse_uniton(j["uniton"], c);
  if (j.contains("dressing")) parse_dressing(j["dressing"], c);
  if (j.contains("gauss")) parse_gauss(j["gauss"], c);
  if (j.contains("verify")) {
    io::require_keys(j["verify"], {"input", "Q0"}, "verify");
    if (j["verify"].contains("input")) c.verify_input = string(j["verify"]["input"], "verify.input");
    if (j["verify"].contains("Q0")) c.q0 = io::matrix_from_json(j["verify"]["Q0"], "verify.Q0");
  }

  // What each command needs.
  const bool has_mu = c.mu.n() > 0;
  if (command == "verify") {
    if (!c.verify_input) bad("verify", "verify.input (a LoopField JSON) is required");
  } else if (command == "gauss") {
    if (!c.gauss.frame && !(c.finite_type && c.finite_type->q0)) {
      bad("gauss", "needs gauss.frame or a twisted finite-type potential");
    }
  } else if (!has_mu) {
    bad("config", "a potential or demo is required for \"" + command + "\"");
  }
  if (command == "uniton" && !c.uniton.frame && !(c.finite_type && c.finite_type->q0)) {
    bad("uniton", "needs uniton.frame or a twisted finite-type potential");
  }
  if ((command == "complete" || (command == "dress" && c.dressing.kind == "simple")) && !c.dressing.v) {
    bad("dressing", "dressing.V is required");
  }
  if (command == "complete") {
    for (double a : c.dressing.a_sequence) {
      if (a >= 1.0 || a < 1e-3) bad("dressing.a_sequence", "values must lie in [1e-3, 1)");
    }
  }

  const int n = command == "verify" ? 0 : size_of(c, command);
  if (j.contains("n")) {
    c.n = integer(j["n"], "n");
    if (n != 0 && c.n != n) bad("n", "does not match the potential (" + std::to_string(n) + ")");
  } else {
    c.n = n;
  }
  if (c.uniton.frame && c.uniton.frame->coeffs().front().rows() != c.n) bad("uniton.frame", "wrong number of rows");
  if (c.dressing.v && c.dressing.v->rows() != c.n) bad("dressing.V", "wrong number of rows");
  if (c.dressing.h && c.dressing.h->n() != c.n) bad("dressing.h", "wrong size");
  if (c.q0 && c.q0->rows() != c.q0->cols()) bad("verify.Q0", "must be square");
  return c;
}

ExperimentConfig load_config(const std::string& path, const std::string& command, const Overrides& ov) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  Json j;
  try {
    j = Json::parse(ss.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
  ExperimentConfig c = parse_config(j, command, ov);
  if (c.verify_input && std::filesystem::path(*c.verify_input).is_relative()) {
    c.verify_input = (std::filesystem::path(path).parent_path() / *c.verify_input).string();
  }
  return c;
}

}  // namespace loopmaps
