#pragma once

#include <optional>
#include <string>

#include "agdlab/point.hpp"

namespace agdlab {

/// Exact range of a per-coordinate gradient over a box.
struct GradRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Contract satisfied by every minimized function: value, per-coordinate
/// gradient, and an upper bound on Hessian magnitudes over a box.
/// Implementations are immutable after construction and safe to share
/// read-only across concurrent runs.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual int dim() const = 0;

  /// Objective value. Throws std::domain_error outside the domain
  /// (e.g. nonpositive price for a market objective).
  virtual double value(const Point& p) const = 0;

  /// j-th partial derivative.
  virtual double grad_coord(const Point& p, int j) const = 0;

  /// Full gradient. Default loops grad_coord; implementations override
  /// when a joint evaluation is cheaper.
  virtual Point gradient(const Point& p) const {
    Point g(static_cast<std::size_t>(dim()));
    for (int j = 0; j < dim(); ++j) g[static_cast<std::size_t>(j)] = grad_coord(p, j);
    return g;
  }

  /// Upper bound on max over `box` of |d^2 f / dp_j dp_k|. Exact for
  /// quadratics. Monotone in box inclusion.
  virtual double hessian_bound(int j, int k, const CoordBox& box) const = 0;

  /// True when the Hessian is constant, so hessian_bound ignores the box.
  virtual bool constant_hessian() const { return false; }

  /// Strong convexity parameter, when known.
  virtual std::optional<double> strong_convexity() const { return std::nullopt; }

  /// Exact gradient range over a box (affine gradients only).
  virtual std::optional<GradRange> grad_extremes(int j, const CoordBox& box) const {
    (void)j;
    (void)box;
    return std::nullopt;
  }

  virtual bool in_domain(const Point& p) const {
    return static_cast<int>(p.size()) == dim() && all_finite(p);
  }

  virtual std::string name() const { return "objective"; }
};

struct FdGradientCheck {
  double analytic = 0.0;
  double central_difference = 0.0;
  double rel_err = 0.0;
};

/// Central-difference check of grad_coord; rel_err is measured against
/// max(1, |analytic|).
FdGradientCheck fd_gradient_check(const Objective& obj, const Point& p, int j, double h);

}  // namespace agdlab
