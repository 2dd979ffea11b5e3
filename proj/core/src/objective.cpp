#include "agdlab/objective.hpp"

#include <cmath>
#include <stdexcept>

namespace agdlab {

FdGradientCheck fd_gradient_check(const Objective& obj, const Point& p, int j, double h) {
  if (j < 0 || j >= obj.dim()) throw std::invalid_argument("fd_gradient_check: bad coordinate");
  if (!(h > 0.0)) throw std::invalid_argument("fd_gradient_check: step must be positive");

  Point plus = p;
  Point minus = p;
  plus[static_cast<std::size_t>(j)] += h;
  minus[static_cast<std::size_t>(j)] -= h;

  FdGradientCheck out;
  out.analytic = obj.grad_coord(p, j);
  out.central_difference = (obj.value(plus) - obj.value(minus)) / (2.0 * h);
  out.rel_err = std::abs(out.analytic - out.central_difference) / std::max(1.0, std::abs(out.analytic));
  return out;
}

}  // namespace agdlab
