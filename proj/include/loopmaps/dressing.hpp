#pragma once

#include <vector>

#include "loopmaps/dpw.hpp"

namespace loopmaps {

/// h # Phi: unitary Iwasawa factor of h Phi(z) at every node. h must be invertible on S^1.
LoopField dress_plus(const LaurentLoop& h, const LoopField& phi, const IwasawaOptions& opts = {});

/// gamma_{a,V} = pi_V + xi_a pi_V^perp with xi_a(lambda) = (conj(a) lambda - 1)/(lambda - a) * (1 - a)/(conj(a) - 1).
struct SimpleFactor {
  Complex a;
  ComplexMatrix pi;  ///< Hermitian projection onto V
};

/// DomainError unless 0 < |a| < 1; V given by any full-rank frame.
SimpleFactor simple_factor(Complex a, const ComplexMatrix& v_frame);

Complex xi_a(Complex a, Complex lambda);

/// gamma_{a,V}(lambda); DomainError at lambda = a.
ComplexMatrix simple_factor_eval(const SimpleFactor& sf, Complex lambda);

struct SimpleDressing {
  LoopField phi;
  DefectStat residue;      ///< ||pi_V^perp Phi(a) pi_W||, zero by the choice of W
  DefectStat out_of_band;  ///< DFT energy of the result outside [-M, M]
  DefectStat unitarity;    ///< on the circle samples
};

struct SimpleDressingOptions {
  /// Coefficients of Phi below this (relative) are dropped before evaluating at a.
  double trim = 1e-13;
  /// Certificate threshold for out_of_band and unitarity.
  double tol = 1e-8;
};

/// gamma_{a,V} Phi gamma_{a,W}^{-1} with W = Phi(a)^{-1} V at every node.
/// FactorizationError where Phi(a) is singular, TruncationError when the
/// certificate fails (the closed form does not apply there).
SimpleDressing dress_simple(const SimpleFactor& sf, const LoopField& phi, const SimpleDressingOptions& opts = {});

struct CompletionStep {
  double a = 0.0;
  double delta = 0.0;  ///< sup distance of gamma_a . mu to gamma . mu
  double Delta = 0.0;  ///< sup distance of gamma_a # Phi_mu to Phi_{gamma . mu}
};

struct CompletionReport {
  std::vector<CompletionStep> steps;
  bool monotone = false;
  double delta_ratio = 0.0;  ///< final / initial
  double Delta_ratio = 0.0;
  double ratio_threshold = 0.1;
  bool passed = false;
};

/// Simple factors gamma_a with a real in a_sequence against the uniton
/// gamma = pi_V + pi_V^perp / lambda. AdmissibilityError unless
/// pi_V^perp mu_{-1} pi_V = 0 on the grid.
CompletionReport completion_limit_experiment(const Potential& mu, const ComplexMatrix& v_frame, const Grid& grid,
                                             const DpwOptions& opts = {},
                                             std::vector<double> a_sequence = {1e-1, 1e-2, 1e-3},
                                             double ratio_threshold = 0.1);

}  // namespace loopmaps
