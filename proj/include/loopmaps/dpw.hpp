#pragma once

#include "loopmaps/iwasawa.hpp"
#include "loopmaps/potentials.hpp"

namespace loopmaps {

enum class IntegrationMethod {
  kAuto,   ///< exact exponential when the dz part is constant, RK4 otherwise
  kRK4,    ///< RK4 along a spanning tree of grid edges
  kExact,  ///< exp(z xi) at the lambda samples; DomainError unless xi is constant
};

struct DpwOptions {
  /// Half-width M of every loop in the output fields.
  int trunc = kDefaultTruncation;
  IntegrationMethod method = IntegrationMethod::kAuto;
  /// Relative local error per edge, estimated by step doubling.
  double ode_tol = 1e-10;
  /// Substeps per grid edge are doubled up to this cap.
  int max_substeps = 64;
  /// Integrate the non-tree edges too and report the holonomy defect.
  bool certify_holonomy = true;
  IwasawaOptions iwasawa;
};

struct IntegrationReport {
  bool exact = false;
  int max_substeps = 0;           ///< largest substep count used on an edge
  double max_local_error = 0.0;   ///< largest accepted step-doubling estimate
  double holonomy_defect = 0.0;   ///< max relative mismatch on non-tree edges
  double aliasing = 0.0;          ///< max DFT energy outside [-M, M]
  double basepoint = 0.0;         ///< ||Psi(0) - I||
};

/// Psi with Psi^{-1} dPsi = mu and Psi(0) = I on the grid.
LoopField integrate_potential(const Potential& mu, const Grid& grid, const DpwOptions& opts = {},
                              IntegrationReport* report = nullptr);

struct ExtendedSolution {
  LoopField psi;
  LoopField phi;  ///< based, unitary on S^1
  LoopField b;    ///< plus factor, Psi = Phi b
  IntegrationReport integration;
  DefectStat round_trip;  ///< ||Psi - Phi b|| on the circle
  DefectStat unitarity;
  DefectStat purity;
};

/// integrate_potential followed by an Iwasawa split at every node.
/// Factorization errors are rethrown with the grid node attached.
ExtendedSolution extended_solution(const Potential& mu, const Grid& grid, const DpwOptions& opts = {});

/// phi(z) = Phi(z)(lambda), lambda = -1 by default.
MapField harmonic_map(const LoopField& phi, Complex lambda = -1.0);

/// dz coefficient of alpha': -b_0 xi_{-1} b_0^{-1} at every node.
MapField alpha_prime(const LoopField& b, const Potential& mu);

struct ExtendedSolutionReport {
  DefectStat support;     ///< mass of L outside {-1, 0} and of Lbar outside {0, 1}
  DefectStat structural;  ///< ||L_0 + L_{-1}|| + ||Lbar_0 + Lbar_1||
  DefectStat conjugacy;   ///< ||Lbar_0 + L_0^*||
  DefectStat alpha;       ///< ||L_{-1} + alpha'|| when alpha' is supplied
};

/// L = Phi^{-1} dPhi/dz and Lbar = Phi^{-1} dPhi/dzbar by differences on the grid,
/// checked against the extended-solution form (1 - 1/lambda) alpha' + (1 - lambda) alpha''.
/// With alpha_prime (e.g. from alpha_prime()) the lambda^{-1} coefficient is compared to it.
ExtendedSolutionReport verify_extended_solution(const LoopField& phi, const MapField* alpha_prime = nullptr);

/// ||dbar b - b zeta + (1 - lambda) alpha'' b|| sup over the circle, alpha'' = -(alpha')^*.
DefectStat holomorphic_structure_defect(const LoopField& b, const MapField& alpha_prime,
                                        const Potential& mu);

/// ||dbar(phi^{-1} dphi) + d(phi^{-1} dbar phi)|| by nested differences.
DefectStat verify_harmonic(const MapField& phi);

}  // namespace loopmaps
