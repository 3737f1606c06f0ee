#include <doctest.h>

#include "loopmaps/dpw.hpp"
#include "support.hpp"

using namespace loopmaps;
using testsupport::e;
using testsupport::random_matrix;

namespace {

Grid grid(int samples, double w) {
  Grid g;
  g.half_width = w;
  g.samples = samples;
  return g;
}

DpwOptions options(int trunc) {
  DpwOptions o;
  o.trunc = trunc;
  return o;
}

// eta = A/lambda + eta_0 - lambda A^*, twisted by diag(1, -1).
LaurentLoop s2_eta() {
  ComplexMatrix a = ComplexMatrix::Zero(2, 2);
  a(0, 1) = 0.6;
  a(1, 0) = 0.4;
  ComplexMatrix e0 = ComplexMatrix::Zero(2, 2);
  e0(0, 0) = Complex(0.0, 0.3);
  e0(1, 1) = Complex(0.0, -0.3);
  return LaurentLoop::monomial(a, -1, 16) + LaurentLoop::constant(e0, 16) -
         LaurentLoop::monomial(a.adjoint(), 1, 16);
}

}  // namespace

TEST_SUITE("dpw") {

TEST_CASE("zero potential") {
  const Grid g = grid(9, 0.5);
  const ExtendedSolution sol = extended_solution(Potential::zero(2), g, options(8));
  const LaurentLoop id = LaurentLoop::identity(2, 8);
  for (std::size_t q = 0; q < sol.psi.values.size(); ++q) {
    CHECK(sol.psi.values[q].distance(id) < 1e-15);
    CHECK(sol.phi.values[q].distance(id) < 1e-12);
    CHECK(sol.b.values[q].distance(id) < 1e-12);
  }
  const MapField phi = harmonic_map(sol.phi);
  CHECK(verify_harmonic(phi).max < 1e-10);
  const ExtendedSolutionReport r = verify_extended_solution(sol.phi);
  CHECK(r.support.max < 1e-10);
  CHECK(r.structural.max < 1e-10);
  CHECK(alpha_prime(sol.b, Potential::zero(2)).values.front().norm() == 0.0);
}

TEST_CASE("nilpotent potential integrates to a polynomial") {
  // xi = N / lambda with N^2 = 0: Psi = I + z N / lambda.
  const ComplexMatrix n = 0.8 * e(2, 0, 1);
  const Potential mu = Potential::polynomial({{0, LaurentLoop::monomial(n, -1)}});
  const Grid g = grid(9, 0.5);
  for (IntegrationMethod m : {IntegrationMethod::kExact, IntegrationMethod::kRK4}) {
    DpwOptions o = options(8);
    o.method = m;
    IntegrationReport rep;
    const LoopField psi = integrate_potential(mu, g, o, &rep);
    CHECK(rep.exact == (m == IntegrationMethod::kExact));
    for (int j = 0; j < g.samples; ++j) {
      for (int i = 0; i < g.samples; ++i) {
        const LaurentLoop ref = LaurentLoop::identity(2, 8) + LaurentLoop::monomial(g.z(i, j) * n, -1, 8);
        CHECK(psi.at(i, j).distance(ref) < 1e-12);
      }
    }
    CHECK(rep.holonomy_defect < 1e-12);
    CHECK(rep.basepoint < 1e-15);
  }
}

TEST_CASE("RK4 branch agrees with the exact exponential") {
  const Potential mu = Potential::polynomial({{0, s2_eta()}});
  const Grid g = grid(33, 0.5);
  DpwOptions rk = options(16);
  rk.method = IntegrationMethod::kRK4;
  IntegrationReport rep;
  const LoopField a = integrate_potential(mu, g, rk, &rep);
  const LoopField b = integrate_potential(mu, g, options(16));
  CHECK(field_distance(a, b) < 1e-8);
  CHECK(rep.holonomy_defect < 1e-8);
  CHECK(rep.aliasing < 1e-12);
  CHECK_THROWS_AS(
      [&] {
        DpwOptions ex = options(8);
        ex.method = IntegrationMethod::kExact;
        integrate_potential(Potential::polynomial({{1, s2_eta()}}), g, ex);
      }(),
      DomainError);
}

TEST_CASE("plus potentials have trivial unitary factor") {
  std::mt19937_64 rng(41);
  const ComplexMatrix a = random_matrix(rng, 2, 2, 0.4), c = random_matrix(rng, 2, 2, 0.4);
  const Potential mu =
      Potential::polynomial({{0, LaurentLoop::constant(a, 12) + LaurentLoop::monomial(c, 1, 12)},
                             {1, LaurentLoop::monomial(c, 2, 12)}});
  const Grid g = grid(9, 0.5);
  const ExtendedSolution sol = extended_solution(mu, g, options(12));
  const LaurentLoop id = LaurentLoop::identity(2, 12);
  for (std::size_t q = 0; q < sol.phi.values.size(); ++q) {
    CHECK(sol.phi.values[q].distance(id) < 1e-9);
    CHECK(sol.b.values[q].distance(sol.psi.values[q]) < 1e-9);
  }
}

TEST_CASE("finite type sphere demo") {
  const FiniteTypePotential ft = finite_type_potential(1, s2_eta(), Eigen::Vector2cd(1.0, -1.0).asDiagonal().toDenseMatrix());
  const Potential mu = ft.potential();
  const Grid g = grid(33, 0.5);
  const ExtendedSolution sol = extended_solution(mu, g, options(16));
  CHECK(sol.round_trip.max < 1e-8);
  const auto [i0, j0] = g.origin();
  CHECK(sol.phi.at(i0, j0).distance(LaurentLoop::identity(2, 16)) < 1e-9);
  CHECK(sol.b.at(i0, j0).distance(LaurentLoop::identity(2, 16)) < 1e-9);

  const ExtendedSolutionReport r = verify_extended_solution(sol.phi);
  CHECK(r.support.max < 1e-5);
  CHECK(r.structural.max < 1e-5);
  CHECK(r.conjugacy.max < 1e-5);

  const MapField ap = alpha_prime(sol.b, mu);
  CHECK((ap.at(i0, j0) + ft.lowest()).norm() < 1e-9);
  CHECK(holomorphic_structure_defect(sol.b, ap, mu).max < 1e-5);
  CHECK(verify_extended_solution(sol.phi, &ap).alpha.max < 1e-6);

  const MapField phi = harmonic_map(sol.phi);
  double unitarity = 0.0;
  for (const auto& v : phi.values) unitarity = std::max(unitarity, (v.adjoint() * v - identity(2)).norm());
  CHECK(unitarity < 1e-9);
  CHECK(verify_harmonic(phi).max < 1e-4);
}

TEST_CASE("constant uniton loop maps to a reflection") {
  const Grid g = grid(5, 0.5);
  std::mt19937_64 rng(42);
  const ComplexMatrix p = testsupport::random_projection(rng, 3, 1);
  LoopField f(g);
  for (auto& v : f.values) v = LaurentLoop::constant(p, 4) + LaurentLoop::monomial(identity(3) - p, 1, 4);
  const MapField phi = harmonic_map(f);
  CHECK((phi.at(2, 3) - (2.0 * p - identity(3))).norm() < 1e-14);
}

TEST_CASE("negative controls") {
  // A lambda^2 uniton factor of a moving line is not an extended solution.
  const Grid g = grid(33, 0.5);
  const PolynomialFrame frame({Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0)});
  LoopField f(g);
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const ComplexMatrix p = hermitian_projection(frame.eval(g.z(i, j)));
      f.at(i, j) = LaurentLoop::constant(p, 8) + LaurentLoop::monomial(identity(2) - p, 2, 8);
    }
  }
  CHECK(verify_extended_solution(f).support.max > 1e-2);

  // Rotation by |z|^2 is not harmonic.
  MapField rot(g);
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      const double t = std::norm(g.z(i, j));
      ComplexMatrix m(2, 2);
      m << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
      rot.at(i, j) = m;
    }
  }
  CHECK(verify_harmonic(rot).max > 1e-2);
}

}  // TEST_SUITE
