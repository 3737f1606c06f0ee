#include "loopmaps/demos.hpp"

namespace loopmaps::demos {

namespace {

ComplexMatrix unit(int n, int i, int j, Complex v = 1.0) {
  ComplexMatrix m = ComplexMatrix::Zero(n, n);
  m(i, j) = v;
  return m;
}

LaurentLoop band_one(const ComplexMatrix& a, const ComplexMatrix& e0, int trunc) {
  return LaurentLoop::monomial(a, -1, trunc) + LaurentLoop::constant(e0, trunc) -
         LaurentLoop::monomial(a.adjoint(), 1, trunc);
}

}  // namespace

Grid fine_grid() {
  Grid g;
  g.half_width = 0.5;
  g.samples = 33;
  return g;
}

Grid default_grid() { return Grid{}; }

ComplexMatrix base_involution(int n, int k) {
  ComplexMatrix q = -identity(n);
  for (int i = 0; i < k; ++i) q(i, i) = 1.0;
  return q;
}

FiniteTypePotential sphere(int trunc) {
  const ComplexMatrix a = unit(2, 0, 1, 0.6) + unit(2, 1, 0, 0.4);
  const ComplexMatrix e0 = unit(2, 0, 0, Complex(0.0, 0.3)) + unit(2, 1, 1, Complex(0.0, -0.3));
  return finite_type_potential(1, band_one(a, e0, trunc), base_involution(2, 1));
}

FiniteTypePotential gauss3(int trunc) {
  const Complex p1(0.5, 0.0), p2(0.0, 0.3), q1(0.4, 0.0), q2(-0.2, 0.1);
  const ComplexMatrix a = unit(3, 0, 1, p1) + unit(3, 0, 2, p2) + unit(3, 1, 0, q1) + unit(3, 2, 0, q2);
  const ComplexMatrix e0 = unit(3, 0, 0, Complex(0.0, 0.2)) + unit(3, 1, 1, Complex(0.0, -0.1)) +
                           unit(3, 2, 2, Complex(0.0, 0.1)) + unit(3, 1, 2, 0.1) + unit(3, 2, 1, -0.1);
  return finite_type_potential(1, band_one(a, e0, trunc), base_involution(3, 1));
}

UnitonPair pt_pair(int trunc) {
  const ComplexMatrix a = unit(3, 0, 1, 0.7) + unit(3, 2, 1, 0.4);
  const ComplexMatrix c = unit(3, 0, 0, Complex(0.0, 0.1)) + unit(3, 0, 1, 0.2) + unit(3, 1, 0, -0.2) +
                          unit(3, 1, 2, 0.1) + unit(3, 2, 1, -0.1) + unit(3, 2, 2, Complex(0.0, -0.1));
  const ComplexMatrix d = unit(3, 0, 2, 0.3);
  Potential mu = Potential::polynomial({{0, LaurentLoop::monomial(a, -1, trunc) + LaurentLoop::constant(c, trunc)},
                                        {1, LaurentLoop::monomial(d, 1, trunc)}});
  ComplexMatrix f0 = ComplexMatrix::Zero(3, 1), f1 = ComplexMatrix::Zero(3, 1);
  f0(0, 0) = 1.0;
  f1(2, 0) = 1.0;
  return {std::move(mu), PolynomialFrame({f0, f1})};
}

CompletionSetup completion(int trunc) {
  const ComplexMatrix n = unit(2, 0, 1, 0.5);
  ComplexMatrix v = ComplexMatrix::Zero(2, 1);
  v(0, 0) = 1.0;
  return {Potential::polynomial({{0, band_one(n, ComplexMatrix::Zero(2, 2), trunc)}}), v};
}

GaugeMap random_plus_gauge(std::mt19937_64& rng, int n, double scale, int trunc) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<PotentialTerm> terms;
  for (int j = 0; j <= 2; ++j) {
    std::vector<ComplexMatrix> coeffs;
    for (int k = 0; k <= 2; ++k) {
      ComplexMatrix h(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) h(r, c) = Complex(g(rng), g(rng));
      if (j == 0 && k == 0) h += identity(n);
      coeffs.push_back(h);
    }
    terms.push_back({j, LaurentLoop(0, std::move(coeffs), trunc)});
  }
  return GaugeMap::plus(std::move(terms));
}

SubbundleField counterexample(const SubbundleField& sphere_psi) {
  const Grid& g = sphere_psi.grid;
  SubbundleField out(g, sphere_psi.rank + 1);
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const Complex z = g.z(i, j);
      ComplexMatrix p = ComplexMatrix::Zero(4, 4);
      p.topLeftCorner(2, 2) = sphere_psi.at(i, j);
      p.bottomRightCorner(2, 2) = hermitian_projection(Eigen::Vector2cd(1.0, z * z));
      out.at(i, j) = p;
    }
  }
  return out;
}

std::vector<std::string> finite_type_names() { return {"sphere", "gauss3"}; }

FiniteTypePotential finite_type_by_name(const std::string& name, int trunc) {
  if (name == "sphere") return sphere(trunc);
  if (name == "gauss3") return gauss3(trunc);
  throw ConfigError("unknown finite type demo '" + name + "'");
}

}  // namespace loopmaps::demos
