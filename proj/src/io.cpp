#include "loopmaps/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace loopmaps::io {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw ConfigError(where + ": " + what);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) bad(where, "expected a number");
  return j.get<double>();
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) bad(where, "expected an integer");
  return j.get<int>();
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) bad(where, std::string("missing key \"") + key + "\"");
  return j.at(key);
}

// Shortest representation that reads back to the same double.
std::string exact(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

void append_entries(std::string& row, const ComplexMatrix& m) {
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) {
      row += ',';
      row += exact(m(r, c).real());
      row += ',';
      row += exact(m(r, c).imag());
    }
  }
}

std::string entry_header(int n) {
  std::string h;
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) h += ",re_" + std::to_string(r) + std::to_string(c) + ",im_" + std::to_string(r) + std::to_string(c);
  return h;
}

}  // namespace

void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  if (!j.is_object()) bad(where, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; })) {
      bad(where, "unknown key \"" + key + "\"");
    }
  }
}

Json complex_to_json(Complex c) { return Json::array({c.real(), c.imag()}); }

Complex complex_from_json(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (!j.is_array() || j.size() != 2) bad(where, "expected a number or [re, im]");
  return {number(j[0], where), number(j[1], where)};
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a non-empty list of rows");
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  if (cols == 0) bad(where, "rows must be non-empty lists");
  ComplexMatrix m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad(where, "ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          complex_from_json(j[r][c], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

Json loop_to_json(const LaurentLoop& a) {
  Json coeffs = Json::array();
  for (const ComplexMatrix& c : a.coeffs()) {
    for (int r = 0; r < c.rows(); ++r)
      for (int s = 0; s < c.cols(); ++s) coeffs.push_back(complex_to_json(c(r, s)));
  }
  return {{"n", a.n()}, {"kmin", a.kmin()}, {"kmax", a.kmax()}, {"coeffs", std::move(coeffs)}};
}

LaurentLoop loop_from_json(const Json& j, const std::string& where, int trunc) {
  require_keys(j, {"n", "kmin", "kmax", "coeffs"}, where);
  const int n = integer(member(j, "n", where), where + ".n");
  const int kmin = integer(member(j, "kmin", where), where + ".kmin");
  const int kmax = integer(member(j, "kmax", where), where + ".kmax");
  const Json& coeffs = member(j, "coeffs", where);
  if (n < 1) bad(where, "n must be positive");
  if (kmax < kmin) bad(where, "kmax < kmin");
  const auto count = static_cast<std::size_t>(kmax - kmin + 1) * static_cast<std::size_t>(n * n);
  if (!coeffs.is_array() || coeffs.size() != count) {
    bad(where, "coeffs must hold (kmax - kmin + 1) n^2 = " + std::to_string(count) + " entries");
  }
  std::vector<ComplexMatrix> cs;
  std::size_t q = 0;
  for (int k = kmin; k <= kmax; ++k) {
    ComplexMatrix m(n, n);
    for (int r = 0; r < n; ++r)
      for (int s = 0; s < n; ++s, ++q) {
        const Json& e = coeffs[q];
        if (!e.is_array() || e.size() != 2) bad(where + ".coeffs", "entries must be [re, im]");
        m(r, s) = complex_from_json(e, where + ".coeffs");
      }
    cs.push_back(std::move(m));
  }
  return LaurentLoop(kmin, std::move(cs), std::max({trunc, -kmin, kmax}));
}

Json grid_to_json(const Grid& g) {
  return {{"center", complex_to_json(g.center)}, {"half_width", g.half_width}, {"samples", g.samples}};
}

Grid grid_from_json(const Json& j, const std::string& where) {
  require_keys(j, {"center", "half_width", "samples"}, where);
  Grid g;
  if (j.contains("center")) g.center = complex_from_json(j["center"], where + ".center");
  if (j.contains("half_width")) g.half_width = number(j["half_width"], where + ".half_width");
  if (j.contains("samples")) g.samples = integer(j["samples"], where + ".samples");
  return g;
}

Json loop_field_to_json(const LoopField& f) {
  Json loops = Json::array();
  for (const LaurentLoop& l : f.values) loops.push_back(loop_to_json(l));
  return {{"grid", grid_to_json(f.grid)}, {"loops", std::move(loops)}};
}

LoopField loop_field_from_json(const Json& j, const std::string& where, int trunc) {
  require_keys(j, {"grid", "loops"}, where);
  const Grid g = grid_from_json(member(j, "grid", where), where + ".grid");
  g.validate();
  const Json& loops = member(j, "loops", where);
  if (!loops.is_array() || static_cast<int>(loops.size()) != g.size()) {
    bad(where, "loops must hold samples^2 = " + std::to_string(g.size()) + " entries");
  }
  LoopField f(g);
  for (std::size_t q = 0; q < loops.size(); ++q) {
    f.values[q] = loop_from_json(loops[q], where + ".loops[" + std::to_string(q) + "]", trunc);
    if (f.values[q].n() != f.values[0].n()) bad(where, "loops of different sizes");
  }
  return f;
}

std::string map_field_csv(const MapField& f) {
  const int n = static_cast<int>(f.values.front().rows());
  std::string out = "i,j" + entry_header(n) + "\n";
  for (int j = 0; j < f.grid.samples; ++j) {
    for (int i = 0; i < f.grid.samples; ++i) {
      std::string row = std::to_string(i) + "," + std::to_string(j);
      append_entries(row, f.at(i, j));
      out += row + "\n";
    }
  }
  return out;
}

std::string subbundle_csv(const SubbundleField& f) {
  const int n = static_cast<int>(f.projections.front().rows());
  std::string out = "i,j,flags" + entry_header(n) + "\n";
  for (int j = 0; j < f.grid.samples; ++j) {
    for (int i = 0; i < f.grid.samples; ++i) {
      std::string row = std::to_string(i) + "," + std::to_string(j) + "," +
                        std::to_string(static_cast<int>(f.flags[static_cast<std::size_t>(f.grid.index(i, j))]));
      append_entries(row, f.at(i, j));
      out += row + "\n";
    }
  }
  return out;
}

Json subbundle_to_json(const SubbundleField& f) {
  Json points = Json::array();
  for (int j = 0; j < f.grid.samples; ++j) {
    for (int i = 0; i < f.grid.samples; ++i) {
      points.push_back({{"i", i},
                        {"j", j},
                        {"flags", static_cast<int>(f.flags[static_cast<std::size_t>(f.grid.index(i, j))])},
                        {"projection", matrix_to_json(f.at(i, j))}});
    }
  }
  return {{"grid", grid_to_json(f.grid)}, {"rank", f.rank}, {"points", std::move(points)}};
}

Json stat_to_json(const DefectStat& s, const Grid& g) {
  Json argmax = nullptr;
  if (s.count > 0 && s.argmax_i >= 0) {
    argmax = {{"i", s.argmax_i}, {"j", s.argmax_j}, {"z", complex_to_json(g.z(s.argmax_i, s.argmax_j))}};
  }
  return {{"max", s.max}, {"mean", s.mean}, {"count", s.count}, {"argmax", std::move(argmax)}};
}

PotentialSpec potential_from_json(const Json& j, const std::string& where, int trunc) {
  if (!j.is_object()) bad(where, "expected an object");
  const Json& type = member(j, "type", where);
  if (!type.is_string()) bad(where + ".type", "expected a string");
  const std::string t = type.get<std::string>();
  PotentialSpec spec;
  if (t == "finite_type") {
    require_keys(j, {"type", "d", "eta", "Q0"}, where);
    const int d = integer(member(j, "d", where), where + ".d");
    const LaurentLoop eta = loop_from_json(member(j, "eta", where), where + ".eta", trunc);
    std::optional<ComplexMatrix> q0;
    if (j.contains("Q0")) q0 = matrix_from_json(j["Q0"], where + ".Q0");
    try {
      spec.finite_type = finite_type_potential(d, eta, q0);
    } catch (const Error& e) {
      bad(where, e.what());
    }
    spec.mu = spec.finite_type->potential();
  } else if (t == "polynomial") {
    require_keys(j, {"type", "n", "terms"}, where);
    const Json& terms = member(j, "terms", where);
    if (!terms.is_array()) bad(where + ".terms", "expected a list");
    std::vector<PotentialTerm> ts;
    for (std::size_t q = 0; q < terms.size(); ++q) {
      const std::string w = where + ".terms[" + std::to_string(q) + "]";
      require_keys(terms[q], {"zpow", "loop"}, w);
      ts.push_back({integer(member(terms[q], "zpow", w), w + ".zpow"), loop_from_json(member(terms[q], "loop", w), w + ".loop", trunc)});
    }
    const int n = j.contains("n") ? integer(j["n"], where + ".n") : (ts.empty() ? 0 : ts.front().loop.n());
    if (n < 1) bad(where, "n is required for a potential without terms");
    for (const PotentialTerm& term : ts) {
      if (term.loop.n() != n) bad(where, "term size differs from n");
    }
    try {
      spec.mu = ts.empty() ? Potential::zero(n) : Potential::polynomial(std::move(ts));
    } catch (const Error& e) {
      bad(where, e.what());
    }
  } else {
    bad(where + ".type", "unknown potential type \"" + t + "\"");
  }
  return spec;
}

PolynomialFrame frame_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) bad(where, "expected a list of matrices (coefficients of z^0, z^1, ...)");
  std::vector<ComplexMatrix> cs;
  for (std::size_t q = 0; q < j.size(); ++q) {
    cs.push_back(matrix_from_json(j[q], where + "[" + std::to_string(q) + "]"));
    if (cs.back().rows() != cs.front().rows() || cs.back().cols() != cs.front().cols()) {
      bad(where, "frame coefficients of different shapes");
    }
  }
  return PolynomialFrame(std::move(cs));
}

}  // namespace loopmaps::io
