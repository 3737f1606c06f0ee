#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loopmaps/fields.hpp"

namespace loopmaps {

inline constexpr int kMaxZDegree = 8;

/// xi(z) and zeta(z) evaluated at a fixed set of lambda values.
using PointEvaluator =
    std::function<void(Complex z, std::span<ComplexMatrix> xi, std::span<ComplexMatrix> zeta)>;

/// One term z^j C_j(lambda) of a polynomial dz part.
struct PotentialTerm {
  int zpow = 0;
  LaurentLoop loop;
};

/// mu = xi(z) dz + zeta(z, zbar) dzbar with loop values. The dz part takes values
/// in Lambda_{-1,infty}; the dzbar part, when present, in Lambda_+.
///
/// Potentials are evaluated pointwise in lambda: bind() fixes a set of lambda
/// values (normally the circle samples) and returns an evaluator in z.
class Potential {
 public:
  using Binder = std::function<PointEvaluator(std::vector<Complex> lambdas)>;

  enum class Kind { kPolynomial, kGauged };

  Potential() = default;
  Potential(int n, Kind kind, bool has_dzbar, Binder binder, std::string label);

  /// sum_j z^j C_j dz; C_j must have kmin >= -1 and j <= kMaxZDegree.
  static Potential polynomial(std::vector<PotentialTerm> terms);
  static Potential zero(int n);

  int n() const { return n_; }
  Kind kind() const { return kind_; }
  bool has_dzbar() const { return has_dzbar_; }
  const std::string& label() const { return label_; }
  const std::vector<PotentialTerm>& terms() const { return terms_; }

  PointEvaluator bind(std::vector<Complex> lambdas) const { return binder_(std::move(lambdas)); }

  /// Constant dz part with no dzbar part (closed-form exp branch), if any.
  std::optional<LaurentLoop> constant_xi() const;

  /// Coefficients of xi(z), zeta(z) recovered from 4*trunc circle samples on |k| <= trunc.
  LaurentLoop xi_loop(Complex z, int trunc = kDefaultTruncation) const;
  LaurentLoop zeta_loop(Complex z, int trunc = kDefaultTruncation) const;

 private:
  int n_ = 0;
  Kind kind_ = Kind::kPolynomial;
  bool has_dzbar_ = false;
  Binder binder_;
  std::string label_;
  std::vector<PotentialTerm> terms_;
};

/// Constant potential lambda^{d-1} eta dz with eta in Omega_d: |k| <= d and
/// eta_{-k} = -eta_k^*. With q0 the potential is twisted: Q0 eta_k Q0 = (-1)^k eta_k.
struct FiniteTypePotential {
  int d = 1;
  LaurentLoop eta;
  std::optional<ComplexMatrix> q0;

  Potential potential() const;
  /// eta_{-d}
  ComplexMatrix lowest() const { return eta.coeff(-d); }
  /// Component of eta_{-d} in Hom(V0^perp, V0), V0 the +1 eigenspace of Q0.
  ComplexMatrix lowest_minus() const;
  ComplexMatrix lowest_plus() const;
  /// ||eta(1)||, zero iff eta is based (Omega_d proper).
  double based_defect() const;
};

/// Validates parity, bandwidth, reality and (if q0 given) the twist.
FiniteTypePotential finite_type_potential(int d, const LaurentLoop& eta,
                                          std::optional<ComplexMatrix> q0 = std::nullopt,
                                          double tol = 1e-8);

/// Which space the kernel of eta^-_{-d} is taken in.
enum class KernelDomain {
  kMorphism,   ///< kernel of eta^-_{-d} as a morphism V0^perp -> V0 (a subspace of V0^perp)
  kFullSpace,  ///< kernel of eta^-_{-d} as an endomorphism of C^n
};

/// Orthonormal frame of l0 = ker eta^-_{-d}. Requires q0.
ComplexMatrix ker_minus_part(const FiniteTypePotential& p, KernelDomain domain = KernelDomain::kMorphism,
                             double rank_tol = 1e-10);
/// Orthonormal frame of ker eta_{-d}.
ComplexMatrix ker_lowest(const FiniteTypePotential& p, double rank_tol = 1e-10);

/// h(z): either a plus gauge sum_j z^j H_j(lambda) (H_j in Lambda_+, holomorphic
/// in z) or the uniton gauge pi + lambda^{-1} pi^perp of a polynomial frame.
class GaugeMap {
 public:
  enum class Kind { kPlus, kUniton };

  static GaugeMap plus(std::vector<PotentialTerm> terms);
  static GaugeMap constant(const LaurentLoop& h);
  static GaugeMap uniton(const PolynomialFrame& frame);

  Kind kind() const { return kind_; }
  int n() const { return n_; }
  const std::vector<PotentialTerm>& terms() const { return terms_; }
  const std::optional<PolynomialFrame>& frame() const { return frame_; }

  /// h(z) as a loop.
  LaurentLoop loop_at(Complex z, int trunc = kDefaultTruncation) const;

  /// h, dh/dz and dh/dzbar at (z, lambda_s) for each bound lambda.
  struct Jet {
    std::vector<ComplexMatrix> value, dz, dzbar;
  };
  using JetEvaluator = std::function<void(Complex z, Jet& out)>;
  JetEvaluator bind(std::vector<Complex> lambdas) const;

 private:
  Kind kind_ = Kind::kPlus;
  int n_ = 0;
  std::vector<PotentialTerm> terms_;
  std::optional<PolynomialFrame> frame_;
};

/// gamma_l for a polynomial frame of l.
GaugeMap build_uniton_gauge(const PolynomialFrame& frame);

struct AdmissibilityReport {
  double max_defect = 0.0;  ///< max over the grid of ||pi^perp mu_{-1} pi||
  double scale = 0.0;       ///< max over the grid of ||mu_{-1}||
  int argmax_i = -1;
  int argmax_j = -1;
};

/// pi^perp mu_{-1} pi on the grid for a uniton gauge.
AdmissibilityReport uniton_admissibility(const GaugeMap& h, const Potential& mu, const Grid& grid);

struct GaugeOptions {
  /// Uniton gauges are refused when max ||pi^perp mu_{-1} pi|| > rel_tol * max(1, ||mu_{-1}||).
  double admissibility_rel_tol = 1e-8;
};

/// h . mu = h mu h^{-1} - dh h^{-1}. For uniton gauges the admissibility of the
/// frame is checked on `grid` and AdmissibilityError raised on failure.
Potential gauge_action(const GaugeMap& h, const Potential& mu, const Grid& grid,
                       const GaugeOptions& opts = {});

struct HatMembership {
  double lambda_minus_two = 0.0;  ///< max ||xi_{-2}|| (and below) over the grid
  double dzbar_negative = 0.0;    ///< max of the negative-frequency dzbar coefficients
};

/// How far a gauged potential is from the enlarged class (dz part in Lambda_{-1,infty},
/// dzbar part in Lambda_+), sampled on the grid.
HatMembership hat_membership(const Potential& mu, const Grid& grid, int trunc = kDefaultTruncation);

/// max over interior nodes and circle samples of ||dbar xi - d zeta - [xi, zeta]||,
/// derivatives by fourth-order differences on the grid.
double flatness_residual(const Potential& mu, const Grid& grid, int lambda_samples = 16);

}  // namespace loopmaps
