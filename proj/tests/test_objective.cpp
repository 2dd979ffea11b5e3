#include <Eigen/Dense>
#include <cmath>
#include <memory>

#include "agdlab/linear_systems.hpp"
#include "agdlab/markets.hpp"
#include "agdlab/objective.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace agdlab;
using namespace agdlab::testing;

namespace {

SpdObjective make_spd(std::initializer_list<std::initializer_list<double>> rows,
                      std::initializer_list<double> rhs) {
  const auto n = static_cast<long>(rows.size());
  Eigen::MatrixXd a(n, n);
  long i = 0;
  for (const auto& row : rows) {
    long j = 0;
    for (double v : row) a(i, j++) = v;
    ++i;
  }
  Eigen::VectorXd b(n);
  long k = 0;
  for (double v : rhs) b(k++) = v;
  return SpdObjective(SpdProblem::from(a, b));
}

std::shared_ptr<CesFisherMarket> symmetric_ces() {
  CesMarket m;
  m.goods = 2;
  m.buyers = {{1.0, -1.0, {1.0, 1.0}}};
  return std::make_shared<CesFisherMarket>(m);
}

std::shared_ptr<LeontiefFisherMarket> unit_leontief() {
  LeontiefMarket m;
  m.goods = 2;
  m.buyers = {{1.0, {0, 1}, {1.0, 1.0}}};
  return std::make_shared<LeontiefFisherMarket>(m);
}

}  // namespace

TEST_CASE("spd objective values and gradients") {
  auto identity = make_spd({{1, 0}, {0, 1}}, {0, 0});
  CHECK(identity.value({0.0, 0.0}) == doctest::Approx(0.0));
  CHECK(identity.value({1.0, 1.0}) == doctest::Approx(1.0));

  auto shifted = make_spd({{1, 0}, {0, 1}}, {1, 1});
  CHECK(shifted.grad_coord({0.0, 0.0}, 0) == doctest::Approx(-1.0));

  // first-order optimality at the minimizer
  const Point star = shifted.problem().solution();
  CHECK(shifted.grad_coord(star, 0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(shifted.grad_coord(star, 1) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("constant hessian bounds of a quadratic") {
  auto coupled = make_spd({{2, 1}, {1, 2}}, {0, 0});
  const CoordBox anybox = CoordBox::degenerate({0.3, -0.7}, 0);
  CHECK(coupled.hessian_bound(0, 1, anybox) == doctest::Approx(1.0));
  CHECK(coupled.hessian_bound(0, 0, anybox) == doctest::Approx(2.0));
  CHECK(coupled.constant_hessian());
}

TEST_CASE("ces market value, gradient and hessian cap against oracles") {
  auto market = symmetric_ces();
  MarketPotential phi(market);
  const Point p{1.0, 1.0};

  // demand from the numerical utility maximizer
  auto utility = [&](const Point& x) { return ces_utility({1.0, 1.0}, -1.0, x); };
  const auto x_oracle = numeric_utility_max(utility, p, 1.0, {0, 1});
  CHECK(x_oracle[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(x_oracle[1] == doctest::Approx(0.5).epsilon(1e-6));

  // gradient is -z with the oracle demand
  CHECK(phi.grad_coord(p, 0) == doctest::Approx(1.0 - x_oracle[0]).epsilon(1e-6));
  CHECK(phi.grad_coord(p, 0) == doctest::Approx(0.5));

  // value equals sum of prices plus money-weighted log indirect utility
  const double u_hat = utility(x_oracle);
  CHECK(phi.value(p) == doctest::Approx(2.0 + std::log(u_hat)).epsilon(1e-6));
  CHECK(u_hat == doctest::Approx(0.25).epsilon(1e-6));

  // Property-1 cap at a degenerate box: true |H_01| = theta x0 x1 / e = 0.125
  const CoordBox degen = CoordBox::degenerate(p, 0);
  const double cap = ces_hessian_bound(*market, 0, 1, degen, p);
  CHECK(cap == doctest::Approx(0.25));
  auto value_fn = [&](const Point& q) { return phi.value(q); };
  const double true_h = fd_hessian(value_fn, p, 0, 1, 1e-4);
  CHECK(true_h == doctest::Approx(0.125).epsilon(1e-4));
  CHECK(std::abs(true_h) <= cap + 1e-9);
}

TEST_CASE("ces hessian bound inflation follows the drift factors") {
  auto market = symmetric_ces();
  const Point ref{1.0, 1.0};
  CoordBox box;
  box.lo = {0.81, 0.81};
  box.hi = {1.21, 1.21};
  box.pinned_coord = 0;
  box.pinned_value = 1.0;
  box.lo[0] = box.hi[0] = 1.0;
  const double inflated = ces_hessian_bound(*market, 0, 1, box, ref);
  const double at_ref = ces_hessian_bound(*market, 0, 1, CoordBox::degenerate(ref, 0), ref);
  CHECK(inflated == doctest::Approx(at_ref / (0.81 * 0.81)));
}

TEST_CASE("leontief market against the bisection oracle") {
  auto market = unit_leontief();
  MarketPotential phi(market);
  const Point p{0.5, 0.5};

  // achievable utility by bisection on feasibility: cost(u) <= e
  double lo = 0.0, hi = 1e6;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double cost = mid * (p[0] / 1.0 + p[1] / 1.0);
    (cost <= 1.0 ? lo : hi) = mid;
  }
  CHECK(lo == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(market->indirect_utility(0, p) == doctest::Approx(lo).epsilon(1e-9));

  // demand spends the budget in fixed proportions
  const Point x = market->demand(0, p);
  CHECK(x[0] == doctest::Approx(1.0));
  CHECK(x[1] == doctest::Approx(1.0));

  // (0.5, 0.5) clears this market, so the gradient vanishes there
  CHECK(phi.grad_coord(p, 0) == doctest::Approx(0.0));
  CHECK(phi.value(p) == doctest::Approx(1.0 + std::log(1.0)));

  // away from the clearing set the gradient still matches -z
  const Point q{1.0, 1.0};
  const Point z = market->excess_demand(q);
  CHECK(phi.grad_coord(q, 0) == doctest::Approx(-z[0]));
}

TEST_CASE("fd_gradient_check examples") {
  auto identity = make_spd({{1, 0}, {0, 1}}, {0, 0});
  auto r = fd_gradient_check(identity, {1.0, 0.0}, 0, 1e-5);
  CHECK(r.rel_err < 1e-8);

  MarketPotential ces(symmetric_ces());
  r = fd_gradient_check(ces, {1.0, 1.0}, 0, 1e-6);
  CHECK(r.rel_err < 1e-6);

  MarketPotential leo(unit_leontief());
  r = fd_gradient_check(leo, {0.5, 0.5}, 0, 1e-6);
  CHECK(r.rel_err < 1e-6);
}

TEST_CASE("fd gradients agree on 100 random points per family") {
  Rng rng(2024);
  auto coupled = make_spd({{2, 1}, {1, 2}}, {1, -1});
  MarketPotential ces(symmetric_ces());
  MarketPotential leo(unit_leontief());
  const Objective* objs[] = {&coupled, &ces, &leo};
  for (const Objective* obj : objs) {
    for (int trial = 0; trial < 100; ++trial) {
      const Point p = random_point(obj->dim(), rng, 0.4, 2.5);
      const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(obj->dim())));
      const auto chk = fd_gradient_check(*obj, p, j, 1e-6);
      CHECK(chk.rel_err < 1e-5);
    }
  }
}

TEST_CASE("hessian bound is monotone in box inclusion") {
  auto market = symmetric_ces();
  MarketPotential phi(market);
  Rng rng(77);
  for (int trial = 0; trial < 200; ++trial) {
    const Point center = random_point(2, rng, 0.5, 2.0);
    const double w_small = rng.uniform(0.01, 0.2);
    const double w_big = w_small + rng.uniform(0.0, 0.3);
    CoordBox small, big;
    for (const double w : {w_small, w_big}) {
      CoordBox& b = w == w_small ? small : big;
      b.lo = center;
      b.hi = center;
      for (std::size_t k = 0; k < 2; ++k) {
        b.lo[k] = center[k] * (1.0 - w);
        b.hi[k] = center[k] * (1.0 + w);
      }
      b.pinned_coord = 0;
      b.pinned_value = center[0];
      b.lo[0] = b.hi[0] = center[0];
    }
    const int j = 0;
    const int k = 1;
    CHECK(phi.hessian_bound(j, k, small) <= phi.hessian_bound(j, k, big) + 1e-12);
    CHECK(small.subset_of(big));
  }
}

TEST_CASE("quadratic grad extremes equal corner enumeration") {
  Rng rng(5150);
  const Eigen::MatrixXd a = random_spd(4, rng);
  Eigen::VectorXd b(4);
  for (int i = 0; i < 4; ++i) b(i) = rng.uniform(-1, 1);
  SpdObjective obj(SpdProblem::from(a, b));

  for (int trial = 0; trial < 50; ++trial) {
    CoordBox box;
    box.lo = random_point(4, rng, -2.0, 0.0);
    box.hi = box.lo;
    for (auto& h : box.hi) h += rng.uniform(0.0, 2.0);
    box.pinned_coord = static_cast<int>(rng.below(4));
    box.pinned_value = rng.uniform(-1.0, 1.0);
    box.lo[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;
    box.hi[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;

    const auto fast = obj.grad_extremes(box.pinned_coord, box);
    REQUIRE(fast.has_value());
    double lo = 1e300, hi = -1e300;
    for (int mask = 0; mask < 16; ++mask) {
      Point corner(4);
      bool valid = true;
      for (int k = 0; k < 4; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        corner[ks] = (mask >> k) & 1 ? box.hi[ks] : box.lo[ks];
      }
      if (!valid) continue;
      const double g = obj.grad_coord(corner, box.pinned_coord);
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    CHECK(fast->lo == doctest::Approx(lo).epsilon(1e-12));
    CHECK(fast->hi == doctest::Approx(hi).epsilon(1e-12));
  }
}

TEST_CASE("midpoint convexity holds for every built-in objective") {
  Rng rng(99);
  auto coupled = make_spd({{2, 1}, {1, 2}}, {1, 0});
  MarketPotential ces(symmetric_ces());
  MarketPotential leo(unit_leontief());
  const Objective* objs[] = {&coupled, &ces, &leo};
  for (const Objective* obj : objs) {
    for (int trial = 0; trial < 100; ++trial) {
      const Point p = random_point(obj->dim(), rng, 0.3, 3.0);
      const Point q = random_point(obj->dim(), rng, 0.3, 3.0);
      Point mid(p.size());
      for (std::size_t k = 0; k < p.size(); ++k) mid[k] = 0.5 * (p[k] + q[k]);
      CHECK(obj->value(mid) <= 0.5 * obj->value(p) + 0.5 * obj->value(q) + 1e-12);
    }
  }
}

TEST_CASE("market objectives reject nonpositive prices") {
  MarketPotential ces(symmetric_ces());
  CHECK_THROWS_AS(ces.value({1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(ces.grad_coord({-1.0, 1.0}, 0), std::domain_error);
  CHECK_FALSE(ces.in_domain({1.0, 0.0}));
}

TEST_CASE("ces market validation rejects bad specs") {
  CesMarket bad;
  bad.goods = 2;
  bad.buyers = {{1.0, 0.0, {1.0, 1.0}}};  // rho = 0 boundary
  CHECK_THROWS_AS((CesFisherMarket{bad}), std::invalid_argument);

  CesMarket undesired;
  undesired.goods = 2;
  undesired.buyers = {{1.0, -1.0, {1.0, 0.0}}};  // good 1 desired by no buyer
  CHECK_THROWS_AS((CesFisherMarket{undesired}), std::invalid_argument);
}
