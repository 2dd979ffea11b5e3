#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace agdlab {

/// A coordinate vector. Market problems keep all entries strictly positive.
using Point = std::vector<double>;

inline bool all_finite(const Point& p) {
  for (double x : p) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

/// Per-coordinate interval product with one pinned coordinate.
/// The admissible set of stale views for an update to `pinned_coord`.
struct CoordBox {
  std::vector<double> lo;
  std::vector<double> hi;
  int pinned_coord = 0;
  double pinned_value = 0.0;

  int dim() const { return static_cast<int>(lo.size()); }

  static CoordBox degenerate(const Point& p, int j) {
    CoordBox b;
    b.lo = p;
    b.hi = p;
    b.pinned_coord = j;
    b.pinned_value = p[static_cast<std::size_t>(j)];
    return b;
  }

  void validate() const {
    if (lo.size() != hi.size()) throw std::invalid_argument("CoordBox: lo/hi size mismatch");
    if (pinned_coord < 0 || pinned_coord >= dim())
      throw std::invalid_argument("CoordBox: pinned coordinate out of range");
    for (std::size_t k = 0; k < lo.size(); ++k) {
      if (!(lo[k] <= hi[k])) throw std::invalid_argument("CoordBox: lo > hi");
    }
    const auto j = static_cast<std::size_t>(pinned_coord);
    if (lo[j] != pinned_value || hi[j] != pinned_value)
      throw std::invalid_argument("CoordBox: pinned coordinate not degenerate");
  }

  bool contains(const Point& p, double tol = 0.0) const {
    if (static_cast<int>(p.size()) != dim()) return false;
    for (std::size_t k = 0; k < p.size(); ++k) {
      const double pad = tol * std::max(1.0, std::abs(p[k]));
      if (p[k] < lo[k] - pad || p[k] > hi[k] + pad) return false;
    }
    return true;
  }

  bool subset_of(const CoordBox& other, double tol = 0.0) const {
    if (other.dim() != dim()) return false;
    for (std::size_t k = 0; k < lo.size(); ++k) {
      const double pad = tol * std::max(1.0, std::abs(other.lo[k]));
      if (lo[k] < other.lo[k] - pad || hi[k] > other.hi[k] + pad) return false;
    }
    return true;
  }

  Point midpoint() const {
    Point m(lo.size());
    for (std::size_t k = 0; k < lo.size(); ++k) m[k] = 0.5 * (lo[k] + hi[k]);
    m[static_cast<std::size_t>(pinned_coord)] = pinned_value;
    return m;
  }
};

}  // namespace agdlab
