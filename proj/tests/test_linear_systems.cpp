#include <sstream>

#include "agdlab/linear_systems.hpp"
#include "agdlab/matrix_market.hpp"
#include "agdlab/validate.hpp"
#include "doctest.h"
#include "helpers.hpp"

using namespace agdlab;
using namespace agdlab::testing;

namespace {

Eigen::MatrixXd mat2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

}  // namespace

TEST_CASE("spd gamma bound follows the closed form") {
  CHECK(spd_gamma_bound(Eigen::MatrixXd::Identity(2, 2), 0) == doctest::Approx(1.001));
  CHECK(spd_gamma_bound(mat2(2, 1, 1, 2), 0) == doctest::Approx(5.0 * 1.001));
  CHECK(spd_gamma_bound(mat2(4, 0, 0, 9), 1) == doctest::Approx(9.0 * 1.001));
  CHECK_THROWS_AS(spd_gamma_bound(mat2(1, 2, 3, 1), 0), std::invalid_argument);
  CHECK_THROWS_AS(spd_gamma_bound(mat2(1, 0, 0, 1), 0, 1.5), std::invalid_argument);
}

TEST_CASE("spd gamma bound satisfies A1 with alpha = 2") {
  Rng rng(808);
  const Eigen::MatrixXd a = random_spd(6, rng);
  SpdObjective obj(SpdProblem::from(a, Eigen::VectorXd::Zero(6)));
  const auto gammas = spd_gamma_bounds(a);
  for (int j = 0; j < 6; ++j) {
    // gamma / alpha >= A_jj / 2 per coordinate
    CHECK(gammas[static_cast<std::size_t>(j)] / 2.0 >= a(j, j) / 2.0);
    // the quadratic remainder is exactly (A_jj/2) d^2
    const Point p = random_point(6, rng, -1.0, 1.0);
    const double d = rng.uniform(-0.5, 0.5);
    Point q = p;
    q[static_cast<std::size_t>(j)] += d;
    const double remainder = obj.value(q) - obj.value(p) - obj.grad_coord(p, j) * d;
    CHECK(remainder == doctest::Approx(0.5 * a(j, j) * d * d).epsilon(1e-9));
  }
}

TEST_CASE("spd gamma bound fills the cross-coupling slack") {
  // With alpha tightened to min_j 2 gamma_j / A_jj, the closed-form gammas
  // leave 4 sum_k |A_jk| / gamma_j strictly under 1 - 1/alpha.
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd a = random_spd(6, rng);
    const auto gammas = spd_gamma_bounds(a);
    double inv_alpha = 0.0, eps4 = 0.0;
    for (int j = 0; j < 6; ++j) {
      double off = 0.0;
      for (int k = 0; k < 6; ++k)
        if (k != j) off += std::abs(a(j, k));
      inv_alpha = std::max(inv_alpha, a(j, j) / (2.0 * gammas[static_cast<std::size_t>(j)]));
      eps4 = std::max(eps4, 4.0 * off / gammas[static_cast<std::size_t>(j)]);
    }
    CHECK(eps4 < 1.0 - inv_alpha);
    CHECK_NOTHROW(quadratic_control_params(a.cwiseAbs(), gammas));
  }
}

TEST_CASE("composite gamma bound") {
  CHECK(composite_gamma_bound(Eigen::MatrixXd::Identity(2, 2), {0.0, 0.0}, 0) == doctest::Approx(1.001));
  CHECK(composite_gamma_bound(Eigen::MatrixXd::Identity(2, 2), {1.0, 1.0}, 0) == doctest::Approx(2.002));
  CHECK(composite_gamma_bound(mat2(2, 1, 1, 2), {0.0, 0.0}, 0) == doctest::Approx(5.005));
}

TEST_CASE("gram cache incremental updates") {
  SUBCASE("zero delta leaves the cache unchanged") {
    CompositeProblem prob{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                          {Univariate::zero(), Univariate::zero()}};
    CompositeObjective obj(prob);
    GramCache cache(obj, {0.5, -0.5});
    const Point before = cache.cached_gradient();
    cache.apply(0, 0.0);
    CHECK(cache.cached_gradient() == before);
  }

  SUBCASE("orthonormal columns update one entry") {
    CompositeProblem prob{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Zero(2),
                          {Univariate::zero(), Univariate::zero()}};
    CompositeObjective obj(prob);
    GramCache cache(obj, {0.0, 0.0});
    const double g1_before = cache.grad(1);
    cache.apply(0, 0.3);
    CHECK(cache.grad(0) == doctest::Approx(0.3));
    CHECK(cache.grad(1) == doctest::Approx(g1_before));
  }

  SUBCASE("cached gradient tracks direct recomputation through 1e4 updates") {
    Rng rng(515);
    Eigen::MatrixXd a(5, 5);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 5; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
    Eigen::VectorXd b(5);
    for (int i = 0; i < 5; ++i) b(i) = rng.uniform(-1.0, 1.0);
    std::vector<Univariate> fs;
    for (int i = 0; i < 5; ++i) fs.push_back(Univariate::quadratic(0.5, 0.1 * i));
    CompositeObjective obj(CompositeProblem{a, b, fs});
    GramCache cache(obj, random_point(5, rng, -1.0, 1.0), /*reanchor_period=*/0);
    for (int u = 0; u < 10000; ++u) cache.apply(static_cast<int>(rng.below(5)), rng.uniform(-0.05, 0.05));
    CHECK(cache.max_rel_drift() <= 1e-10);
    CHECK(cache.updates() == 10000);
  }
}

TEST_CASE("solve_spd on the identity system") {
  SpdProblem prob{Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2)};
  SolveOptions opts;
  opts.horizon = 50.0;
  opts.schedule = SchedulePolicy::synchronous_jitter();
  opts.staleness = parse_staleness_policy("fresh", 0);
  const SolveResult res = solve_spd(prob, opts);
  CHECK(res.converged);
  CHECK(res.residual_inf < 1e-8);
  CHECK(res.solution[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(res.monitor.clean());
}

TEST_CASE("solve_spd on the coupled system reaches (1, 1)") {
  Eigen::VectorXd b(2);
  b << 3, 3;
  SpdProblem prob{mat2(2, 1, 1, 2), b};
  SolveOptions opts;
  opts.horizon = 120.0;
  opts.schedule = SchedulePolicy::random_gap(0.4);
  opts.schedule_seed = 7;
  opts.staleness = parse_staleness_policy("random_in_box", 3);
  const SolveResult res = solve_spd(prob, opts);
  CHECK(res.converged);
  CHECK(res.solution[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.solution[1] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(res.monitor.clean());
  CHECK(validate_trace(res.trace).empty());
}

TEST_CASE("solve_spd 50x50 under an adversarial schedule converges with a clean monitor") {
  Rng rng(4242);
  const Eigen::MatrixXd a = random_spd(50, rng);
  Eigen::VectorXd b(50);
  for (int i = 0; i < 50; ++i) b(i) = rng.uniform(-1.0, 1.0);
  SpdProblem prob{a, b};
  SolveOptions opts;
  opts.horizon = 60.0;
  opts.tolerance = 1e-8;
  opts.schedule = SchedulePolicy::bursty_adversarial(3, 6);
  opts.schedule_seed = 9;
  opts.staleness = parse_staleness_policy("adversarial_in_box", 21);
  const SolveResult res = solve_spd(prob, opts);
  CHECK(res.converged);
  CHECK(res.monitor.update_violations.empty());
  CHECK(res.monitor.gap_violations.empty());
}

TEST_CASE("solve_composite") {
  SUBCASE("pure least squares reduces to p = b") {
    Eigen::VectorXd b(2);
    b << 0.25, -0.5;
    CompositeProblem prob{Eigen::MatrixXd::Identity(2, 2), b, {Univariate::zero(), Univariate::zero()}};
    SolveOptions opts;
    opts.horizon = 60.0;
    const SolveResult res = solve_composite(prob, opts);
    CHECK(res.converged);
    CHECK(res.solution[0] == doctest::Approx(0.25).epsilon(1e-7));
    CHECK(res.solution[1] == doctest::Approx(-0.5).epsilon(1e-7));
  }

  SUBCASE("no quadratic rows leaves the separable minimizers") {
    CompositeProblem prob{Eigen::MatrixXd::Zero(0, 3), Eigen::VectorXd::Zero(0),
                          {Univariate::quadratic(1.0, 1.0), Univariate::quadratic(1.0, 1.0),
                           Univariate::quadratic(1.0, 1.0)}};
    SolveOptions opts;
    opts.horizon = 60.0;
    const SolveResult res = solve_composite(prob, opts);
    CHECK(res.converged);
    for (double x : res.solution) CHECK(x == doctest::Approx(1.0).epsilon(1e-7));
  }

  SUBCASE("quadratic plus least squares solves 2p = b") {
    Eigen::VectorXd b(2);
    b << 2.0, 2.0;
    CompositeProblem prob{Eigen::MatrixXd::Identity(2, 2), b,
                          {Univariate::quadratic(1.0, 0.0), Univariate::quadratic(1.0, 0.0)}};
    SolveOptions opts;
    opts.horizon = 80.0;
    const SolveResult res = solve_composite(prob, opts);
    CHECK(res.converged);
    CHECK(res.solution[0] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(res.solution[1] == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(res.monitor.clean());
  }
}

TEST_CASE("composite grad extremes equal corner enumeration") {
  Rng rng(7117);
  Eigen::MatrixXd a(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = rng.uniform(-1.0, 1.0);
  Eigen::VectorXd b(5);
  for (int i = 0; i < 5; ++i) b(i) = rng.uniform(-1.0, 1.0);
  CompositeObjective obj(CompositeProblem{
      a, b, {Univariate::quadratic(0.7, 0.2), Univariate::zero(), Univariate::quadratic(0.3, -0.1)}});

  for (int trial = 0; trial < 50; ++trial) {
    CoordBox box;
    box.lo = random_point(3, rng, -1.5, 0.0);
    box.hi = box.lo;
    for (auto& h : box.hi) h += rng.uniform(0.0, 1.5);
    box.pinned_coord = static_cast<int>(rng.below(3));
    box.pinned_value = rng.uniform(-1.0, 1.0);
    box.lo[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;
    box.hi[static_cast<std::size_t>(box.pinned_coord)] = box.pinned_value;

    const auto fast = obj.grad_extremes(box.pinned_coord, box);
    REQUIRE(fast.has_value());
    double lo = 1e300, hi = -1e300;
    for (int mask = 0; mask < 8; ++mask) {
      Point corner(3);
      for (int k = 0; k < 3; ++k) {
        const auto ks = static_cast<std::size_t>(k);
        corner[ks] = (mask >> k) & 1 ? box.hi[ks] : box.lo[ks];
      }
      const double g = obj.grad_coord(corner, box.pinned_coord);
      lo = std::min(lo, g);
      hi = std::max(hi, g);
    }
    CHECK(fast->lo == doctest::Approx(lo).epsilon(1e-12));
    CHECK(fast->hi == doctest::Approx(hi).epsilon(1e-12));
  }
}

TEST_CASE("matrix market round trip and vector io") {
  Rng rng(11);
  const Eigen::MatrixXd a = random_spd(4, rng);
  std::ostringstream out;
  write_matrix_market(out, a);
  std::istringstream in(out.str());
  const Eigen::MatrixXd back = read_matrix_market(in);
  CHECK((back - a).cwiseAbs().maxCoeff() == 0.0);

  std::istringstream symmetric(
      "%%MatrixMarket matrix coordinate real symmetric\n"
      "% comment line\n"
      "2 2 3\n"
      "1 1 2.0\n"
      "2 1 1.0\n"
      "2 2 2.0\n");
  const Eigen::MatrixXd sym = read_matrix_market(symmetric);
  CHECK(sym(0, 1) == 1.0);
  CHECK(sym(1, 0) == 1.0);

  std::istringstream arr(
      "%%MatrixMarket matrix array real general\n"
      "2 2\n1\n2\n3\n4\n");
  const Eigen::MatrixXd dense = read_matrix_market(arr);
  CHECK(dense(1, 0) == 2.0);
  CHECK(dense(0, 1) == 3.0);

  std::ostringstream vec_out;
  write_vector(vec_out, {1.5, -2.25, 3.125});
  std::istringstream vec_in(vec_out.str());
  CHECK(read_vector(vec_in) == std::vector<double>{1.5, -2.25, 3.125});

  std::istringstream bad("not a matrix\n");
  CHECK_THROWS(read_matrix_market(bad));
}

TEST_CASE("spd validation rejects asymmetric and indefinite input") {
  CHECK_THROWS_AS(SpdProblem::from(mat2(1, 0.5, 0.2, 1), Eigen::VectorXd::Zero(2)), std::invalid_argument);
  CHECK_THROWS_AS(SpdProblem::from(mat2(1, 2, 2, 1), Eigen::VectorXd::Zero(2)), std::invalid_argument);
  // Near-symmetric input is symmetrized quietly.
  Eigen::MatrixXd nearly = mat2(2, 1, 1, 2);
  nearly(0, 1) += 1e-14;
  CHECK_NOTHROW(SpdProblem::from(nearly, Eigen::VectorXd::Zero(2)));
}

TEST_CASE("async random-gap solve stays within 8x of the synchronous baseline") {
  Rng rng(31);
  const Eigen::MatrixXd a = random_spd(10, rng);
  Eigen::VectorXd b(10);
  for (int i = 0; i < 10; ++i) b(i) = rng.uniform(-1.0, 1.0);
  SpdProblem prob{a, b};
  SpdObjective obj(prob);
  const auto gammas = spd_gamma_bounds(a);

  SolveOptions opts;
  opts.horizon = 120.0;
  opts.tolerance = 1e-6;
  opts.schedule = SchedulePolicy::random_gap(0.3);
  opts.schedule_seed = 5;
  opts.staleness = parse_staleness_policy("random_in_box", 8);
  opts.monitor = false;
  const SolveResult async_res = solve_spd(prob, opts);
  REQUIRE(async_res.time_to_tolerance > 0.0);

  const Trace sync = run_synchronous_baseline(obj, Point(10, 0.0), gammas, 120, "spd");
  const double sync_time = first_time_residual_below(sync, prob, 1e-6);
  REQUIRE(sync_time > 0.0);
  CHECK(async_res.time_to_tolerance <= 8.0 * sync_time);
}
