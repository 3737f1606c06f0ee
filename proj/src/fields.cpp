#include "loopmaps/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "text.hpp"

namespace loopmaps {

Complex Grid::z(int i, int j) const {
  const double step = h();
  return center + Complex(-half_width + i * step, -half_width + j * step);
}

void Grid::validate() const {
  if (samples < 2) throw ConfigError("grid: need at least 2 samples per side");
  if (!(half_width > 0.0) || !std::isfinite(half_width)) {
    throw ConfigError("grid: half_width must be positive and finite");
  }
  (void)origin();
}

std::pair<int, int> Grid::origin() const {
  const double step = h();
  const double fi = (half_width - center.real()) / step;
  const double fj = (half_width - center.imag()) / step;
  const int i = static_cast<int>(std::lround(fi));
  const int j = static_cast<int>(std::lround(fj));
  if (std::abs(fi - i) > 1e-9 || std::abs(fj - j) > 1e-9 || i < 0 || j < 0 || i >= samples ||
      j >= samples) {
    throw ConfigError("grid: z = 0 must be a grid node (center " + text::sci(center.real()) + "+" +
                      text::sci(center.imag()) + "i, half_width " + text::sci(half_width) + ", " +
                      std::to_string(samples) + " samples)");
  }
  return {i, j};
}

void DefectStat::add(double v, int i, int j) {
  ++count;
  mean += (v - mean) / static_cast<double>(count);
  if (argmax_i < 0 || v > max) {
    max = v;
    argmax_i = i;
    argmax_j = j;
  }
}

void DefectStat::merge(const DefectStat& other) {
  if (other.count == 0) return;
  const long total = count + other.count;
  mean = (mean * count + other.mean * other.count) / static_cast<double>(total);
  count = total;
  if (argmax_i < 0 || other.max > max) {
    max = other.max;
    argmax_i = other.argmax_i;
    argmax_j = other.argmax_j;
  }
}

PolynomialFrame::PolynomialFrame(std::vector<ComplexMatrix> coeffs) : coeffs_(std::move(coeffs)) {
  if (coeffs_.empty()) throw SizeMismatch("PolynomialFrame: no coefficients");
  for (const auto& c : coeffs_) {
    if (c.rows() != coeffs_.front().rows() || c.cols() != coeffs_.front().cols()) {
      throw SizeMismatch("PolynomialFrame: coefficient shapes differ");
    }
  }
}

ComplexMatrix PolynomialFrame::eval(Complex z) const {
  ComplexMatrix acc = ComplexMatrix::Zero(n(), rank());
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) {
    acc *= z;
    acc += *it;
  }
  return acc;
}

ComplexMatrix PolynomialFrame::derivative(Complex z) const {
  ComplexMatrix acc = ComplexMatrix::Zero(n(), rank());
  for (int j = static_cast<int>(coeffs_.size()) - 1; j >= 1; --j) {
    acc *= z;
    acc += static_cast<double>(j) * coeffs_[static_cast<std::size_t>(j)];
  }
  return acc;
}

ProjectionJet projection_jet(const PolynomialFrame& frame, Complex z, double rank_tol) {
  const ComplexMatrix f = frame.eval(z);
  const int n = frame.n();
  ProjectionJet jet;
  jet.pi = hermitian_projection(f, rank_tol);
  const ComplexMatrix gram = f.adjoint() * f;
  const ComplexMatrix ginv_fstar = gram.ldlt().solve(f.adjoint());
  jet.d_pi = (identity(n) - jet.pi) * frame.derivative(z) * ginv_fstar;
  jet.dbar_pi = jet.d_pi.adjoint();
  return jet;
}

int SubbundleField::flag_count(unsigned char mask) const {
  return static_cast<int>(
      std::count_if(flags.begin(), flags.end(), [mask](unsigned char f) { return (f & mask) != 0; }));
}

void fill_flagged(SubbundleField& s) {
  const Grid& g = s.grid;
  std::vector<std::pair<int, int>> good;
  for (int j = 0; j < g.samples; ++j)
    for (int i = 0; i < g.samples; ++i)
      if (!s.flagged(i, j)) good.emplace_back(i, j);
  if (good.empty()) throw RankError("subbundle: no regular grid node to fill rank drops from");
  for (int j = 0; j < g.samples; ++j) {
    for (int i = 0; i < g.samples; ++i) {
      if (!s.flagged(i, j)) continue;
      int best = 0;
      int best_d = std::numeric_limits<int>::max();
      for (std::size_t q = 0; q < good.size(); ++q) {
        const int d = (good[q].first - i) * (good[q].first - i) + (good[q].second - j) * (good[q].second - j);
        if (d < best_d) {
          best_d = d;
          best = static_cast<int>(q);
        }
      }
      s.at(i, j) = s.at(good[static_cast<std::size_t>(best)].first, good[static_cast<std::size_t>(best)].second);
    }
  }
}

SubbundleField subbundle_from_frame(const PolynomialFrame& frame, const Grid& grid, double rank_tol) {
  SubbundleField s(grid, frame.rank());
  s.frame = frame;
  for (int j = 0; j < grid.samples; ++j) {
    for (int i = 0; i < grid.samples; ++i) {
      try {
        s.at(i, j) = hermitian_projection(frame.eval(grid.z(i, j)), rank_tol);
      } catch (const RankError&) {
        s.flags[static_cast<std::size_t>(grid.index(i, j))] = kFlagRankDrop;
      }
    }
  }
  if (s.flag_count() > 0) fill_flagged(s);
  return s;
}

SubbundleField orthogonal_complement(const SubbundleField& s) {
  SubbundleField out = s;
  out.frame.reset();
  const int n = static_cast<int>(s.projections.front().rows());
  out.rank = n - s.rank;
  for (auto& p : out.projections) p = identity(n) - p;
  return out;
}

double projection_defect(const SubbundleField& s) {
  double d = 0.0;
  for (const auto& p : s.projections) {
    d = std::max(d, (p * p - p).norm() + (p - p.adjoint()).norm());
    d = std::max(d, std::abs(p.trace() - static_cast<double>(s.rank)));
  }
  return d;
}

MapField evaluate_at(const LoopField& field, Complex lambda) {
  MapField out(field.grid);
  for (std::size_t q = 0; q < field.values.size(); ++q) out.values[q] = field.values[q].eval(lambda);
  return out;
}

double field_distance(const LoopField& a, const LoopField& b) {
  if (a.values.size() != b.values.size()) throw SizeMismatch("field_distance: grids differ");
  double d = 0.0;
  for (std::size_t q = 0; q < a.values.size(); ++q) d = std::max(d, a.values[q].distance(b.values[q]));
  return d;
}

double field_distance(const MapField& a, const MapField& b) {
  if (a.values.size() != b.values.size()) throw SizeMismatch("field_distance: grids differ");
  double d = 0.0;
  for (std::size_t q = 0; q < a.values.size(); ++q) d = std::max(d, (a.values[q] - b.values[q]).norm());
  return d;
}

}  // namespace loopmaps
