#pragma once

#include <string>

#include <json.hpp>

#include "loopmaps/fields.hpp"
#include "loopmaps/potentials.hpp"

namespace loopmaps::io {

using Json = nlohmann::json;

/// Version of the potential / config schema below.
inline constexpr int kSchemaVersion = 1;

/// [re, im]
Json complex_to_json(Complex c);
/// Accepts a number or [re, im].
Complex complex_from_json(const Json& j, const std::string& where);

/// Row-major list of rows, entries [re, im].
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& where);

/// {"n", "kmin", "kmax", "coeffs": [[re, im], ...]}. coeffs runs over k = kmin..kmax,
/// each coefficient in row-major order, so it has (kmax - kmin + 1) n^2 entries.
/// Doubles are written in shortest round-trip form: loop_from_json(loop_to_json(a))
/// reproduces every coefficient bit for bit.
Json loop_to_json(const LaurentLoop& a);
LaurentLoop loop_from_json(const Json& j, const std::string& where, int trunc = kDefaultTruncation);

Json grid_to_json(const Grid& g);
/// {"center": [re, im], "half_width", "samples"}; missing keys keep the defaults.
Grid grid_from_json(const Json& j, const std::string& where);

/// {"grid", "loops": [...]} with loops in node order (j major, i minor).
Json loop_field_to_json(const LoopField& f);
LoopField loop_field_from_json(const Json& j, const std::string& where, int trunc = kDefaultTruncation);

/// One row per node: i,j,re_00,im_00,re_01,... (row-major entries).
std::string map_field_csv(const MapField& f);

/// One row per node: i,j,flags,re_00,im_00,... for the projection.
/// flags bit 0: rank drop, bit 1: no difference stencil.
std::string subbundle_csv(const SubbundleField& f);
Json subbundle_to_json(const SubbundleField& f);

/// {"max", "mean", "count", "argmax": {"i", "j", "z": [re, im]}}; argmax is null when count is 0.
Json stat_to_json(const DefectStat& s, const Grid& g);

/// Potential spec:
///   {"type": "finite_type", "d": 1, "eta": loop, "Q0": matrix (optional)}
///   {"type": "polynomial", "n": 2, "terms": [{"zpow": j, "loop": loop}, ...]}
/// A polynomial spec with no terms is the zero potential of size n.
struct PotentialSpec {
  Potential mu;
  std::optional<FiniteTypePotential> finite_type;
};
PotentialSpec potential_from_json(const Json& j, const std::string& where, int trunc);

/// Polynomial frame: list of n x k matrices, the coefficient of z^0, z^1, ...
PolynomialFrame frame_from_json(const Json& j, const std::string& where);

/// Rejects keys of j (an object) outside `allowed`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);

}  // namespace loopmaps::io
