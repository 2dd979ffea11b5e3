#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <vector>

#include "agdlab/objective.hpp"
#include "agdlab/rng.hpp"

namespace agdlab::testing {

/// Central-difference Hessian entry of a scalar field.
inline double fd_hessian(const std::function<double(const Point&)>& f, const Point& p, int j, int k,
                         double h = 1e-4) {
  Point a = p, b = p, c = p, d = p;
  const auto js = static_cast<std::size_t>(j);
  const auto ks = static_cast<std::size_t>(k);
  if (j == k) {
    a[js] += h;
    c[js] -= h;
    return (f(a) - 2.0 * f(p) + f(c)) / (h * h);
  }
  a[js] += h;
  a[ks] += h;
  b[js] += h;
  b[ks] -= h;
  c[js] -= h;
  c[ks] += h;
  d[js] -= h;
  d[ks] -= h;
  return (f(a) - f(b) - f(c) + f(d)) / (4.0 * h * h);
}

/// Numerical budget-constrained utility maximization: pairwise
/// golden-section transfers of spending between goods. Independent of the
/// closed-form demand; only the utility function itself is consulted.
inline std::vector<double> numeric_utility_max(const std::function<double(const Point&)>& utility,
                                               const Point& prices, double budget,
                                               const std::vector<int>& desired, int passes = 200) {
  const std::size_t n = prices.size();
  std::vector<double> spend(n, 0.0);
  for (int g : desired) spend[static_cast<std::size_t>(g)] = budget / static_cast<double>(desired.size());

  auto bundle_of = [&](const std::vector<double>& s) {
    Point x(n, 0.0);
    for (std::size_t j = 0; j < n; ++j) x[j] = s[j] / prices[j];
    return x;
  };
  auto score = [&](const std::vector<double>& s) { return utility(bundle_of(s)); };

  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int pass = 0; pass < passes; ++pass) {
    double moved = 0.0;
    for (std::size_t a = 0; a < desired.size(); ++a) {
      for (std::size_t b = a + 1; b < desired.size(); ++b) {
        const auto ja = static_cast<std::size_t>(desired[a]);
        const auto jb = static_cast<std::size_t>(desired[b]);
        // transfer t from jb to ja, keeping both spends positive
        const double eps = 1e-12 * budget;
        double lo = -(spend[ja] - eps);
        double hi = spend[jb] - eps;
        auto value_at = [&](double t) {
          auto s = spend;
          s[ja] += t;
          s[jb] -= t;
          return score(s);
        };
        double x1 = hi - gr * (hi - lo);
        double x2 = lo + gr * (hi - lo);
        double f1 = value_at(x1);
        double f2 = value_at(x2);
        for (int it = 0; it < 80; ++it) {
          if (f1 < f2) {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + gr * (hi - lo);
            f2 = value_at(x2);
          } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - gr * (hi - lo);
            f1 = value_at(x1);
          }
        }
        const double t = 0.5 * (lo + hi);
        spend[ja] += t;
        spend[jb] -= t;
        moved = std::max(moved, std::abs(t));
      }
    }
    if (moved < 1e-13 * budget) break;
  }
  return bundle_of(spend);
}

/// CES utility value from raw weights (the ground truth the demand formulas
/// are validated against).
inline double ces_utility(const std::vector<double>& weights, double rho, const Point& x) {
  double sum = 0.0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    if (weights[j] <= 0.0) continue;
    if (x[j] <= 0.0) return 0.0;  // complements: missing a desired good kills utility
    sum += weights[j] * std::pow(x[j], rho);
  }
  return std::pow(sum, 1.0 / rho);
}

/// Random strictly diagonally dominant SPD matrix with homogeneous rows:
/// off-diagonal entries in [-scale, scale], diagonal = dominance * row sum.
inline Eigen::MatrixXd random_spd(int n, Rng& rng, double scale = 1.0, double dominance = 10.0) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-scale, scale);
  for (int i = 0; i < n; ++i) {
    double off = 0.0;
    for (int j = 0; j < n; ++j)
      if (j != i) off += std::abs(a(i, j));
    a(i, i) = dominance * std::max(off, 0.1 * scale);
  }
  return a;
}

inline Point random_point(int n, Rng& rng, double lo, double hi) {
  Point p(static_cast<std::size_t>(n));
  for (auto& x : p) x = rng.uniform(lo, hi);
  return p;
}

}  // namespace agdlab::testing
