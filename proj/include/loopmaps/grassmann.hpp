#pragma once

#include <optional>

#include "loopmaps/dpw.hpp"

namespace loopmaps {

/// phi = Q0 (pi - pi^perp) at every node.
MapField cartan_embed(const SubbundleField& psi, const ComplexMatrix& q0);

struct CartanInverse {
  SubbundleField psi;
  DefectStat involution;  ///< ||(Q0 phi)^2 - I|| + ||(Q0 phi)^* - Q0 phi||
};

/// pi = (I + Q0 phi) / 2. DomainError when the involution defect exceeds tol
/// somewhere (phi is not Grassmannian valued). Nodes whose rank differs from
/// the majority are flagged kFlagRankDrop but kept.
CartanInverse cartan_invert(const MapField& phi, const ComplexMatrix& q0, double tol = 1e-7);

struct SecondFundamentalForms {
  MapField d;     ///< A' = pi^perp (d pi / dz) pi
  MapField dbar;  ///< A'' = pi^perp (d pi / dzbar) pi
  /// Nodes closer than this to the edge carry zero (no stencil); 0 when a
  /// polynomial frame gave exact derivatives.
  int margin = 0;
};

/// Exact when psi carries a polynomial frame, sixth-order differences otherwise.
SecondFundamentalForms second_fundamental_forms(const SubbundleField& psi);

/// max ||A'_psi + (A''_{psi^perp})^*|| over nodes with a stencil.
DefectStat adjoint_duality_defect(const SubbundleField& psi);

/// max ||phi^{-1} dphi / 2 + A'_psi + A'_{psi^perp}||, phi = cartan_embed(psi).
DefectStat derivative_identity_check(const SubbundleField& psi, const MapField& phi);

struct GaussBundle {
  SubbundleField bundle;
  int generic_rank = 0;
  double sigma_max = 0.0;          ///< largest singular value of the form over the grid
  double min_generic_sigma = 0.0;  ///< smallest sigma_{generic rank} over regular nodes
  int rank_drops = 0;              ///< nodes flagged kFlagRankDrop
};

/// direction +1: G'(psi) = Im A'_psi; direction -1: G''(psi) = Im A''_psi.
/// Singular values are compared with rank_tol times the grid-wide maximum;
/// nodes below the generic rank are flagged and filled from the nearest regular node.
/// A form that vanishes on the whole grid yields a rank-0 bundle.
GaussBundle gauss_bundle(const SubbundleField& psi, int direction, double rank_tol = 1e-6);

/// G^(i)(psi) for i = 1..steps in the given direction; stops early at a rank-0 bundle.
std::vector<GaussBundle> gauss_sequence(const SubbundleField& psi, int direction, int steps,
                                        double rank_tol = 1e-6);

/// Kernel of a form restricted to a subbundle, with the same grid-wide rank rule
/// as gauss_bundle. Used for ker A'_{psi^perp} inside psi^perp.
GaussBundle kernel_subbundle(const MapField& form, const SubbundleField& domain, int margin,
                             double rank_tol = 1e-6);

struct UnitonReport {
  DefectStat holomorphic;    ///< ||pi^perp A_z pi||
  DefectStat antiholomorphic;///< ||pi^perp (dbar pi + A_zbar pi)||
  DefectStat commutation;    ///< ||[phi, pi]||
};

/// Uniton conditions for hat, with A = phi^{-1} dphi / 2 by differences.
UnitonReport uniton_condition_check(const SubbundleField& hat, const MapField& phi);

struct UnitonOptions {
  bool check = true;
  double tol = 1e-6;
  /// Also require [phi, pi] = 0 (Grassmannian targets).
  bool grassmannian = false;
};

/// Phi (pi + lambda pi^perp), or (pi0 + pi0^perp / lambda) Phi (pi + lambda pi^perp)
/// when pi0 is given. With opts.check the conditions are verified first and
/// AdmissibilityError raised with the offending defect.
LoopField add_uniton(const LoopField& phi, const SubbundleField& hat,
                     const std::optional<ComplexMatrix>& pi0 = std::nullopt, const UnitonOptions& opts = {});

/// b_0 l at every node (frame of l mapped by b_0 = b(z)(0)).
SubbundleField apply_b0(const SubbundleField& ell, const LoopField& b);

struct ConverseUniton {
  SubbundleField ell;
  DefectStat dbar;           ///< ||A''_l||, zero for a holomorphic l
  DefectStat admissibility;  ///< ||pi^perp xi_{-1} pi||
};

/// l = b_0^{-1} hat with the two checks the converse construction promises.
ConverseUniton converse_uniton(const SubbundleField& hat, const LoopField& b, const Potential& mu);

}  // namespace loopmaps
