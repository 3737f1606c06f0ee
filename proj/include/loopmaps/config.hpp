#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "loopmaps/io.hpp"

namespace loopmaps {

/// Pass thresholds. Each command compares its checks against the entries it names.
struct Tolerances {
  double membership = kMembershipTol;  ///< Iwasawa and loop-group predicates
  double extended = 1e-5;              ///< support and structural defects of Phi
  double alpha = 1e-6;                 ///< alpha' cross-check
  double harmonic = 1e-4;              ///< harmonic-map residual
  double uniton = 1e-6;                ///< uniton conditions
  double distance = 1e-6;              ///< field distances (uniton, dress)
  double cartan = 1e-7;                ///< (Q0 phi)^2 = I
  double identity = 1e-5;              ///< derivative identity of the Gauss bundles
  double duality = 1e-8;               ///< A'_psi = -(A''_{psi^perp})^*
  double rank = 1e-6;                  ///< relative singular-value cutoff
  double completion_ratio = 0.1;       ///< final / initial in the completion experiment
};

struct DressingBlock {
  std::string kind = "plus";  ///< "plus" or "simple"
  /// plus: explicit gauge h(z) = sum z^j H_j(lambda); random seeded gauges when absent.
  std::optional<GaugeMap> h;
  int count = 10;
  double scale = 0.05;
  /// simple: the factor gamma_{a,V}
  Complex a{0.5, 0.0};
  std::optional<ComplexMatrix> v;
  /// complete: values of a
  std::vector<double> a_sequence{1e-1, 1e-2, 1e-3};
};

struct UnitonBlock {
  std::optional<PolynomialFrame> frame;
  /// Finite-type potentials without a frame use l0 = ker of eta^-_{-d} in this domain.
  KernelDomain kernel = KernelDomain::kMorphism;
};

struct GaussBlock {
  int direction = 1;
  int steps = 1;
  /// psi from a polynomial frame; otherwise psi = cartan_invert(phi_mu) for a twisted finite-type potential.
  std::optional<PolynomialFrame> frame;
};

struct ExperimentConfig {
  int n = 0;
  Grid grid;
  int trunc = kDefaultTruncation;
  Tolerances tol;
  std::uint64_t seed = 0;
  std::optional<std::string> demo;
  Potential mu;
  std::optional<FiniteTypePotential> finite_type;
  UnitonBlock uniton;
  DressingBlock dressing;
  GaussBlock gauss;
  /// verify: path of a LoopField JSON (Phi) written by `run`.
  std::optional<std::string> verify_input;
  std::optional<ComplexMatrix> q0;  ///< for verify
};

struct Overrides {
  std::optional<double> tol;  ///< headline threshold of the command being run
  std::optional<int> grid;    ///< grid samples per side
  std::optional<int> trunc;
  std::optional<std::uint64_t> seed;
};

/// Schema (version 1). Top-level keys:
///   schema, n, grid {center, half_width, samples}, trunc, seed, tolerances {...},
///   demo ("sphere", "gauss3", "pt_pair", "completion") or potential (see io.hpp),
///   uniton {frame, kernel: "morphism" | "full"},
///   dressing {kind, h: {"terms": [...]}, count, scale, a, V, a_sequence},
///   gauss {direction, steps, frame}, verify {input, Q0}.
/// Unknown keys anywhere raise ConfigError; so does anything inconsistent.
ExperimentConfig parse_config(const io::Json& j, const std::string& command, const Overrides& ov = {});

/// Reads and parses a file; ConfigError on I/O or JSON syntax errors.
/// A relative verify.input is taken relative to the config's directory.
ExperimentConfig load_config(const std::string& path, const std::string& command, const Overrides& ov = {});

}  // namespace loopmaps
