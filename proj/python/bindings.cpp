#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "loopmaps/commands.hpp"
#include "loopmaps/dressing.hpp"

namespace py = pybind11;
using namespace loopmaps;

namespace {

using ComplexArray = py::array_t<Complex, py::array::c_style | py::array::forcecast>;

// (K, n, n) array -> loop with coefficients at kmin..kmin+K-1.
LaurentLoop loop_from_array(const ComplexArray& a, int kmin, int trunc) {
  if (a.ndim() != 3 || a.shape(1) != a.shape(2)) throw py::value_error("expected a (K, n, n) complex array");
  const auto k = static_cast<int>(a.shape(0));
  const auto n = static_cast<int>(a.shape(1));
  auto r = a.unchecked<3>();
  std::vector<ComplexMatrix> cs;
  for (int q = 0; q < k; ++q) {
    ComplexMatrix m(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) m(i, j) = r(q, i, j);
    cs.push_back(std::move(m));
  }
  return LaurentLoop(kmin, std::move(cs), std::max({trunc, -kmin, kmin + k - 1}));
}

ComplexArray loop_to_array(const LaurentLoop& l) {
  const int n = l.n();
  ComplexArray out({static_cast<py::ssize_t>(l.coeffs().size()), static_cast<py::ssize_t>(n), static_cast<py::ssize_t>(n)});
  auto w = out.mutable_unchecked<3>();
  for (std::size_t q = 0; q < l.coeffs().size(); ++q)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(static_cast<py::ssize_t>(q), i, j) = l.coeffs()[q](i, j);
  return out;
}

ComplexMatrix matrix_from_array(const ComplexArray& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-d complex array");
  auto r = a.unchecked<2>();
  ComplexMatrix m(a.shape(0), a.shape(1));
  for (py::ssize_t i = 0; i < a.shape(0); ++i)
    for (py::ssize_t j = 0; j < a.shape(1); ++j) m(i, j) = r(i, j);
  return m;
}

ComplexArray matrix_to_array(const ComplexMatrix& m) {
  ComplexArray out({m.rows(), m.cols()});
  auto w = out.mutable_unchecked<2>();
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) w(i, j) = m(i, j);
  return out;
}

py::dict iwasawa(const ComplexArray& coeffs, int kmin, int trunc, const std::string& method, double tol) {
  IwasawaOptions o;
  o.trunc = trunc;
  o.tol = tol;
  if (method == "qr") {
    o.method = IwasawaMethod::kQR;
  } else if (method != "cholesky") {
    throw py::value_error("method must be \"cholesky\" or \"qr\"");
  }
  const IwasawaFactors f = iwasawa_factorize(loop_from_array(coeffs, kmin, trunc), o);
  py::dict d;
  d["phi"] = loop_to_array(f.phi);
  d["phi_kmin"] = f.phi.kmin();
  d["b"] = loop_to_array(f.b);
  d["b_kmin"] = f.b.kmin();
  d["round_trip"] = f.diagnostics.round_trip;
  d["unitarity"] = f.diagnostics.unitarity;
  d["basedness"] = f.diagnostics.basedness;
  d["purity"] = f.diagnostics.purity;
  return d;
}

io::Json parse(const std::string& text) {
  try {
    return io::Json::parse(text);
  } catch (const io::Json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

py::tuple run(const std::string& command, const std::string& config, bool want_fields) {
  const ExperimentConfig cfg = parse_config(parse(config), command);
  CommandResult r = run_command(command, cfg, want_fields);
  py::dict files;
  for (const auto& [name, contents] : r.files) files[py::str(name)] = py::bytes(contents);
  return py::make_tuple(r.exit_code, r.report.dump(), files);
}

// phi = Phi(-1) on the config grid, as a (samples, samples, n, n) array indexed [j, i].
ComplexArray harmonic_map_of(const std::string& config) {
  const ExperimentConfig cfg = parse_config(parse(config), "run");
  DpwOptions o;
  o.trunc = cfg.trunc;
  o.iwasawa.tol = cfg.tol.membership;
  const MapField phi = harmonic_map(extended_solution(cfg.mu, cfg.grid, o).phi);
  const py::ssize_t s = cfg.grid.samples;
  const py::ssize_t n = cfg.n;
  ComplexArray out({s, s, n, n});
  auto w = out.mutable_unchecked<4>();
  for (py::ssize_t j = 0; j < s; ++j)
    for (py::ssize_t i = 0; i < s; ++i) {
      const ComplexMatrix& m = phi.at(static_cast<int>(i), static_cast<int>(j));
      for (py::ssize_t r = 0; r < n; ++r)
        for (py::ssize_t c = 0; c < n; ++c) w(j, i, r, c) = m(r, c);
    }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Loop-group construction of harmonic maps (C++ core)";

  // Translators are tried newest first, so the base class goes in first.
  py::register_exception<Error>(m, "NumericalError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

  m.def("iwasawa", &iwasawa, py::arg("coeffs"), py::arg("kmin"), py::arg("trunc") = 0,
        py::arg("method") = "cholesky", py::arg("tol") = kMembershipTol,
        "Split a loop (coefficients kmin.. as a (K, n, n) array) into Phi b.");
  m.def("run_command", &run, py::arg("command"), py::arg("config"), py::arg("want_fields") = false,
        "Run a CLI command on a JSON config string; returns (exit_code, report_json, files).");
  m.def("harmonic_map", &harmonic_map_of, py::arg("config"),
        "phi = Phi(-1) for the potential of a JSON config, shape (samples, samples, n, n) indexed [j, i].");
  m.def(
      "simple_factor",
      [](Complex a, const ComplexArray& v, Complex lambda) {
        return matrix_to_array(simple_factor_eval(simple_factor(a, matrix_from_array(v)), lambda));
      },
      py::arg("a"), py::arg("v"), py::arg("lam"), "gamma_{a,V}(lambda) for a frame V.");
  m.attr("schema_version") = io::kSchemaVersion;
}
