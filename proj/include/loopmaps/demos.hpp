#pragma once

#include <random>
#include <string>
#include <vector>

#include "loopmaps/grassmann.hpp"

namespace loopmaps::demos {

/// 33 x 33 over [-0.5, 0.5]^2 (h = 1/32).
Grid fine_grid();
/// 33 x 33 over [-1, 1]^2.
Grid default_grid();

/// Q0 = pi_V0 - pi_V0^perp for V0 spanned by the first k basis vectors.
ComplexMatrix base_involution(int n, int k);

/// d = 1, n = 2: eta = A/lambda + eta_0 - lambda A^*, A = [[0, 0.6], [0.4, 0]],
/// eta_0 = diag(0.3i, -0.3i), twisted by Q0 = diag(1, -1).
FiniteTypePotential sphere(int trunc = kDefaultTruncation);

/// d = 1, n = 3, V0 = e1: A = [[0, p1, p2], [q1, 0, 0], [q2, 0, 0]]. Here the
/// kernel l0 of A restricted to V0^perp is the line (0, p2, -p1).
FiniteTypePotential gauss3(int trunc = kDefaultTruncation);

struct UnitonPair {
  Potential mu;
  PolynomialFrame ell;
};

/// n = 3, xi = A/lambda + C + z lambda D with A = p E12 + s E32 and l = span(1, 0, z),
/// which A annihilates.
UnitonPair pt_pair(int trunc = kDefaultTruncation);

struct CompletionSetup {
  Potential mu;
  ComplexMatrix v;  ///< frame of V
};

/// eta = N/lambda - lambda N^*, N = 0.5 E12, V = span e1.
CompletionSetup completion(int trunc = kDefaultTruncation);

/// h = I + sum_{j, k <= 2} z^j lambda^k H_jk with small seeded H_jk.
GaugeMap random_plus_gauge(std::mt19937_64& rng, int n, double scale = 0.05, int trunc = kDefaultTruncation);

/// psi (+) delta in C^{2+2}: psi from a harmonic sphere field, delta = span(1, z^2)
/// which is holomorphic and whose second fundamental form vanishes at z = 0.
SubbundleField counterexample(const SubbundleField& sphere_psi);

/// Names accepted by the config "demo" selector.
std::vector<std::string> finite_type_names();
FiniteTypePotential finite_type_by_name(const std::string& name, int trunc = kDefaultTruncation);

}  // namespace loopmaps::demos
