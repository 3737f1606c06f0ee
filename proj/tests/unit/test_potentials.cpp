#include <doctest.h>

#include "loopmaps/potentials.hpp"
#include "support.hpp"

using namespace loopmaps;
using testsupport::e;
using testsupport::random_matrix;
using testsupport::random_unitary;

namespace {

Grid small_grid(int samples = 9, double w = 0.5) {
  Grid g;
  g.half_width = w;
  g.samples = samples;
  return g;
}

ComplexMatrix diag2(Complex a, Complex b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

}  // namespace

TEST_SUITE("potentials") {

TEST_CASE("polynomial potential evaluation") {
  std::mt19937_64 rng(31);
  const ComplexMatrix a = random_matrix(rng, 2, 2), b = random_matrix(rng, 2, 2), c = random_matrix(rng, 2, 2);
  const Potential mu = Potential::polynomial(
      {{0, LaurentLoop::monomial(a, -1) + LaurentLoop::constant(b)}, {2, LaurentLoop::monomial(c, 1)}});
  const Complex z(0.3, -0.2);
  const LaurentLoop xi = mu.xi_loop(z, 8);
  CHECK((xi.coeff(-1) - a).norm() < 1e-13);
  CHECK((xi.coeff(0) - b).norm() < 1e-13);
  CHECK((xi.coeff(1) - z * z * c).norm() < 1e-13);
  CHECK(xi.mass_outside(-1, 1) < 1e-13);
  CHECK(mu.zeta_loop(z, 8).max_coeff_norm() < 1e-15);
  CHECK_FALSE(mu.constant_xi().has_value());
  CHECK(Potential::polynomial({{0, LaurentLoop::constant(a)}}).constant_xi().has_value());

  CHECK_THROWS_AS(Potential::polynomial({{0, LaurentLoop::monomial(a, -2)}}), DomainError);
  CHECK_THROWS_AS(Potential::polynomial({{kMaxZDegree + 1, LaurentLoop::constant(a)}}), DomainError);
}

TEST_CASE("finite type validation") {
  const ComplexMatrix q0 = diag2(1.0, -1.0);
  const LaurentLoop eta = LaurentLoop::monomial(e(2, 0, 1), -1) - LaurentLoop::monomial(e(2, 1, 0), 1);
  const FiniteTypePotential p = finite_type_potential(1, eta, q0);
  CHECK((p.lowest() - e(2, 0, 1)).norm() == 0.0);
  CHECK((p.lowest_minus() - e(2, 0, 1)).norm() == 0.0);
  CHECK(p.lowest_plus().norm() == 0.0);
  CHECK(p.potential().xi_loop(0.0, 8).distance(eta) < 1e-14);

  CHECK_THROWS_AS(finite_type_potential(2, eta, q0), DomainError);
  const LaurentLoop herm = eta + LaurentLoop::constant(diag2(1.0, -1.0));
  CHECK_THROWS_AS(finite_type_potential(1, herm, q0), DomainError);
  const LaurentLoop wide = eta + LaurentLoop::monomial(e(2, 0, 1), -3) - LaurentLoop::monomial(e(2, 1, 0), 3);
  CHECK_THROWS_AS(finite_type_potential(1, wide, q0), DomainError);
  // Diagonal odd coefficients violate the twist.
  const LaurentLoop untwisted = LaurentLoop::monomial(identity(2), -1) - LaurentLoop::monomial(identity(2), 1);
  CHECK_THROWS_AS(finite_type_potential(1, untwisted, q0), DomainError);
  CHECK_NOTHROW(finite_type_potential(1, untwisted));
}

TEST_CASE("kernel of the lowest term") {
  ComplexMatrix q0 = -identity(3);
  q0(0, 0) = 1.0;
  const Complex p1(0.6, 0.1), p2(-0.3, 0.4), q1(0.2, 0.0), q2(0.0, -0.5);
  ComplexMatrix a = ComplexMatrix::Zero(3, 3);
  a(0, 1) = p1;
  a(0, 2) = p2;
  a(1, 0) = q1;
  a(2, 0) = q2;
  const LaurentLoop eta = LaurentLoop::monomial(a, -1) - LaurentLoop::monomial(a.adjoint(), 1);
  const FiniteTypePotential p = finite_type_potential(1, eta, q0);
  const ComplexMatrix l0 = ker_minus_part(p);
  REQUIRE(l0.cols() == 1);
  Eigen::Vector3cd expected(0.0, p2, -p1);
  expected.normalize();
  CHECK(std::abs(std::abs(expected.dot(l0.col(0))) - 1.0) < 1e-12);
  CHECK(ker_minus_part(p, KernelDomain::kFullSpace).cols() == 2);
  CHECK(ker_lowest(p).cols() == 1);

  // n = 2: the morphism kernel is trivial while the full-space one is V0.
  const LaurentLoop eta2 = LaurentLoop::monomial(e(2, 0, 1), -1) - LaurentLoop::monomial(e(2, 1, 0), 1);
  const FiniteTypePotential p2d = finite_type_potential(1, eta2, diag2(1.0, -1.0));
  CHECK(ker_minus_part(p2d).cols() == 0);
  CHECK(ker_minus_part(p2d, KernelDomain::kFullSpace).cols() == 1);
}

TEST_CASE("trivial and constant gauges") {
  std::mt19937_64 rng(32);
  const ComplexMatrix a = random_matrix(rng, 3, 3), b = random_matrix(rng, 3, 3);
  const Potential mu = Potential::polynomial({{0, LaurentLoop::monomial(a, -1)}, {1, LaurentLoop::constant(b)}});
  const Grid g = small_grid();
  const Complex z(0.2, 0.1);

  const Potential same = gauge_action(GaugeMap::constant(LaurentLoop::identity(3)), mu, g);
  CHECK(same.xi_loop(z, 8).distance(mu.xi_loop(z, 8)) < 1e-13);
  CHECK_FALSE(same.has_dzbar());

  const ComplexMatrix u = random_unitary(rng, 3);
  const Potential conj = gauge_action(GaugeMap::constant(LaurentLoop::constant(u)), mu, g);
  const LaurentLoop xi = conj.xi_loop(z, 8);
  CHECK((xi.coeff(-1) - u * a * u.adjoint()).norm() < 1e-13);
  CHECK((xi.coeff(0) - z * u * b * u.adjoint()).norm() < 1e-13);
}

TEST_CASE("z dependent plus gauge against the pointwise formula") {
  // h = I + z lambda N with N^2 = 0, h^{-1} = I - z lambda N, dh/dz = lambda N.
  std::mt19937_64 rng(33);
  const ComplexMatrix n = e(3, 0, 2);
  const ComplexMatrix a = random_matrix(rng, 3, 3);
  const Potential mu = Potential::polynomial({{0, LaurentLoop::monomial(a, -1)}});
  const GaugeMap h = GaugeMap::plus({{0, LaurentLoop::identity(3)}, {1, LaurentLoop::monomial(n, 1)}});
  const Potential out = gauge_action(h, mu, small_grid());
  const Complex z(-0.1, 0.3);
  const LaurentLoop xi = out.xi_loop(z, 8);
  for (const Complex lam : {Complex(1.0, 0.0), std::polar(1.0, 0.7), std::polar(1.0, 2.9)}) {
    const ComplexMatrix hv = identity(3) + z * lam * n;
    const ComplexMatrix hinv = identity(3) - z * lam * n;
    const ComplexMatrix ref = hv * (a / lam) * hinv - lam * n * hinv;
    CHECK((xi.eval(lam) - ref).norm() < 1e-12);
  }
  CHECK(out.zeta_loop(z, 8).max_coeff_norm() < 1e-14);
  CHECK(flatness_residual(out, small_grid(17)) < 1e-10);
}

TEST_CASE("uniton gauge of a constant subspace") {
  // pi^perp A pi = 0 kills the lambda^{-2} term.
  const ComplexMatrix f = Eigen::Vector3cd(1.0, 0.0, 0.0);
  const PolynomialFrame frame({f});
  ComplexMatrix a = ComplexMatrix::Zero(3, 3);
  a(0, 1) = 0.7;
  a(0, 2) = Complex(0.0, 0.2);
  a(1, 2) = 0.5;
  const Potential mu = Potential::polynomial({{0, LaurentLoop::monomial(a, -1)}});
  const Grid g = small_grid();
  const Potential out = gauge_action(GaugeMap::uniton(frame), mu, g);
  const LaurentLoop xi = out.xi_loop(0.1, 8);
  const ComplexMatrix pi = hermitian_projection(f);
  const ComplexMatrix perp = identity(3) - pi;
  CHECK(xi.coeff(-2).norm() < 1e-13);
  CHECK((xi.coeff(-1) - (pi * a * pi + perp * a * perp)).norm() < 1e-13);
  CHECK((xi.coeff(0) - pi * a * perp).norm() < 1e-13);
  const HatMembership hm = hat_membership(out, g, 8);
  CHECK(hm.lambda_minus_two < 1e-13);
  CHECK(hm.dzbar_negative < 1e-13);

  ComplexMatrix bad = a;
  bad(1, 0) = 0.3;
  const Potential mu_bad = Potential::polynomial({{0, LaurentLoop::monomial(bad, -1)}});
  CHECK_THROWS_AS(gauge_action(GaugeMap::uniton(frame), mu_bad, g), AdmissibilityError);
  const AdmissibilityReport r = uniton_admissibility(GaugeMap::uniton(frame), mu_bad, g);
  CHECK(r.max_defect == doctest::Approx(0.3));
}

TEST_CASE("uniton gauge of a moving line") {
  // F = (1, z): gamma(0) = diag(1, 1/lambda), gamma is I at lambda = 1.
  const PolynomialFrame frame({Eigen::Vector2cd(1.0, 0.0), Eigen::Vector2cd(0.0, 1.0)});
  const GaugeMap h = build_uniton_gauge(frame);
  const LaurentLoop g0 = h.loop_at(0.0, 8);
  CHECK((g0.coeff(0) - diag2(1.0, 0.0)).norm() < 1e-15);
  CHECK((g0.coeff(-1) - diag2(0.0, 1.0)).norm() < 1e-15);
  CHECK((h.loop_at(Complex(0.4, 0.2), 8).eval(1.0) - identity(2)).norm() < 1e-14);
  CHECK(h.loop_at(Complex(0.4, 0.2), 8).is_unitary_circle(1e-13));

  // Acting on the zero potential: xi = (1/lambda - 1) d pi, zeta = (1 - lambda) dbar pi.
  const Grid g = small_grid(81, 0.5);
  const Potential out = gauge_action(h, Potential::zero(2), g);
  CHECK(out.has_dzbar());
  auto pi = [&](int i, int j) -> ComplexMatrix { return hermitian_projection(frame.eval(g.z(i, j))); };
  const int i = 50, j = 26;
  const ComplexMatrix dpi = fd_dz(pi, i, j, g.h());
  const ComplexMatrix dbarpi = fd_dzbar(pi, i, j, g.h());
  const LaurentLoop xi = out.xi_loop(g.z(i, j), 8);
  const LaurentLoop zeta = out.zeta_loop(g.z(i, j), 8);
  CHECK((xi.coeff(-1) - dpi).norm() < 1e-6);
  CHECK((xi.coeff(0) + dpi).norm() < 1e-6);
  CHECK((zeta.coeff(0) - dbarpi).norm() < 1e-6);
  CHECK((zeta.coeff(1) + dbarpi).norm() < 1e-6);
  CHECK(xi.mass_outside(-1, 0) < 1e-13);
  CHECK(zeta.mass_outside(0, 1) < 1e-13);
  // Fourth-order convergence of the difference residual.
  const double coarse = flatness_residual(out, small_grid(41, 0.5));
  const double fine = flatness_residual(out, g);
  CHECK(fine < 5e-6);
  CHECK(coarse / fine > 10.0);
}

TEST_CASE("flatness residual detects a non-flat connection") {
  const Grid g = small_grid(17);
  CHECK(flatness_residual(Potential::polynomial({{1, LaurentLoop::constant(e(2, 0, 1))}}), g) == 0.0);
  // xi = zbar A, zeta = B with [A, B] != 0.
  const ComplexMatrix a = e(2, 0, 1), b = e(2, 1, 0);
  Potential::Binder binder = [a, b](std::vector<Complex> lambdas) -> PointEvaluator {
    return [a, b, s = lambdas.size()](Complex z, std::span<ComplexMatrix> xi, std::span<ComplexMatrix> zeta) {
      for (std::size_t k = 0; k < s; ++k) {
        xi[k] = std::conj(z) * a;
        zeta[k] = b;
      }
    };
  };
  const Potential bad(2, Potential::Kind::kGauged, true, binder, "bad");
  CHECK(flatness_residual(bad, g) > 0.5);
}

}  // TEST_SUITE
