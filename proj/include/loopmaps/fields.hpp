#pragma once

#include <optional>
#include <type_traits>
#include <utility>
#include <vector>

#include "loopmaps/loop_algebra.hpp"

namespace loopmaps {

/// Square lattice z(i, j) = center + (-w + i h) + i (-w + j h), 0 <= i, j < samples,
/// with h = 2 w / (samples - 1). i runs along x, j along y.
struct Grid {
  Complex center{0.0, 0.0};
  double half_width = 1.0;
  int samples = 33;

  double h() const { return 2.0 * half_width / (samples - 1); }
  int size() const { return samples * samples; }
  int index(int i, int j) const { return j * samples + i; }
  Complex z(int i, int j) const;
  /// Node holding z = 0; ConfigError if 0 is not (within 1e-9 h) a node.
  std::pair<int, int> origin() const;
  /// Throws ConfigError on a degenerate grid or one without z = 0 as a node.
  void validate() const;
  /// True when (i, j) has `margin` nodes on every side.
  bool interior(int i, int j, int margin) const {
    return i >= margin && j >= margin && i < samples - margin && j < samples - margin;
  }
};

template <class T>
struct Field {
  Grid grid;
  std::vector<T> values;

  Field() = default;
  explicit Field(const Grid& g) : grid(g), values(static_cast<std::size_t>(g.size())) {}
  T& at(int i, int j) { return values[static_cast<std::size_t>(grid.index(i, j))]; }
  const T& at(int i, int j) const { return values[static_cast<std::size_t>(grid.index(i, j))]; }
};

using LoopField = Field<LaurentLoop>;
using MapField = Field<ComplexMatrix>;

/// max / mean / location of a nonnegative defect over grid points.
struct DefectStat {
  double max = 0.0;
  double mean = 0.0;
  int argmax_i = -1;
  int argmax_j = -1;
  long count = 0;

  void add(double v, int i, int j);
  void merge(const DefectStat& other);
};

/// Polynomial n x k frame F(z) = sum_j z^j F_j (holomorphic in z).
class PolynomialFrame {
 public:
  PolynomialFrame() = default;
  explicit PolynomialFrame(std::vector<ComplexMatrix> coeffs);

  int n() const { return static_cast<int>(coeffs_.front().rows()); }
  int rank() const { return static_cast<int>(coeffs_.front().cols()); }
  const std::vector<ComplexMatrix>& coeffs() const { return coeffs_; }
  ComplexMatrix eval(Complex z) const;
  ComplexMatrix derivative(Complex z) const;

 private:
  std::vector<ComplexMatrix> coeffs_;
};

struct ProjectionJet {
  ComplexMatrix pi;
  ComplexMatrix d_pi;     ///< d pi / dz
  ComplexMatrix dbar_pi;  ///< d pi / dzbar = (d pi / dz)^*
};

/// pi = F (F^*F)^{-1} F^*, d pi = pi^perp F' (F^*F)^{-1} F^*, dbar pi = (d pi)^*.
/// Throws RankError where F loses rank.
ProjectionJet projection_jet(const PolynomialFrame& frame, Complex z, double rank_tol = 1e-10);

/// Flag bits of SubbundleField nodes.
inline constexpr unsigned char kFlagRankDrop = 1;   ///< rank below the generic rank
inline constexpr unsigned char kFlagNoStencil = 2;  ///< too close to the edge for differences

/// Hermitian projections of a rank-k subbundle, one per grid node.
struct SubbundleField {
  Grid grid;
  int rank = 0;
  std::vector<ComplexMatrix> projections;
  /// Nonzero at nodes whose value was filled in (rank drop) or is otherwise suspect.
  std::vector<unsigned char> flags;
  std::optional<PolynomialFrame> frame;

  SubbundleField() = default;
  SubbundleField(const Grid& g, int k)
      : grid(g), rank(k), projections(static_cast<std::size_t>(g.size())),
        flags(static_cast<std::size_t>(g.size()), 0) {}
  ComplexMatrix& at(int i, int j) { return projections[static_cast<std::size_t>(grid.index(i, j))]; }
  const ComplexMatrix& at(int i, int j) const {
    return projections[static_cast<std::size_t>(grid.index(i, j))];
  }
  bool flagged(int i, int j) const { return flags[static_cast<std::size_t>(grid.index(i, j))] != 0; }
  int flag_count(unsigned char mask = 0xff) const;
};

/// Overwrite every flagged node with the value at the nearest unflagged node.
/// Throws RankError when every node is flagged.
void fill_flagged(SubbundleField& s);

/// Sample the projection of a polynomial frame on the grid; nodes where the
/// frame drops rank are flagged and filled from the nearest regular node.
SubbundleField subbundle_from_frame(const PolynomialFrame& frame, const Grid& grid,
                                    double rank_tol = 1e-10);

SubbundleField orthogonal_complement(const SubbundleField& s);

/// Max over nodes of ||pi^2 - pi|| + ||pi - pi^*|| and |trace(pi) - k|.
double projection_defect(const SubbundleField& s);

/// Sixth-order centred differences on grid values; (i, j) needs a 3-node margin.
template <class Getter>
auto fd_dx(const Getter& f, int i, int j, double h) {
  using Value = std::decay_t<decltype(f(i, j))>;
  Value out = (f(i + 3, j) - f(i - 3, j) - 9.0 * (f(i + 2, j) - f(i - 2, j)) + 45.0 * (f(i + 1, j) - f(i - 1, j))) *
              (1.0 / (60.0 * h));
  return out;
}

template <class Getter>
auto fd_dy(const Getter& f, int i, int j, double h) {
  using Value = std::decay_t<decltype(f(i, j))>;
  Value out = (f(i, j + 3) - f(i, j - 3) - 9.0 * (f(i, j + 2) - f(i, j - 2)) + 45.0 * (f(i, j + 1) - f(i, j - 1))) *
              (1.0 / (60.0 * h));
  return out;
}

/// d/dz = (d/dx - i d/dy) / 2
template <class Getter>
auto fd_dz(const Getter& f, int i, int j, double h) {
  using Value = std::decay_t<decltype(f(i, j))>;
  Value out = (fd_dx(f, i, j, h) - Complex(0.0, 1.0) * fd_dy(f, i, j, h)) * 0.5;
  return out;
}

/// d/dzbar = (d/dx + i d/dy) / 2
template <class Getter>
auto fd_dzbar(const Getter& f, int i, int j, double h) {
  using Value = std::decay_t<decltype(f(i, j))>;
  Value out = (fd_dx(f, i, j, h) + Complex(0.0, 1.0) * fd_dy(f, i, j, h)) * 0.5;
  return out;
}

inline constexpr int kStencilMargin = 3;

/// Pointwise evaluation of a loop field at one lambda.
MapField evaluate_at(const LoopField& field, Complex lambda);

/// sup over nodes of the coefficient distance.
double field_distance(const LoopField& a, const LoopField& b);
double field_distance(const MapField& a, const MapField& b);

}  // namespace loopmaps
