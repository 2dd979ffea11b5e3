#include <benchmark/benchmark.h>

#include "agdlab/engine.hpp"
#include "agdlab/linear_systems.hpp"
#include "agdlab/rng.hpp"

using namespace agdlab;

namespace {

Eigen::MatrixXd dominant_spd(int n, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < n; ++i) a(i, i) = 10.0 * a.row(i).cwiseAbs().sum() + 1.0;
  return a;
}

void bench_engine_events(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SpdObjective obj(SpdProblem::from(dominant_spd(n, 7), Eigen::VectorXd::Zero(n)));
  RunConfig cfg;
  cfg.objective = &obj;
  cfg.schedule = SchedulePolicy::random_gap(0.3);
  cfg.schedule_seed = 1;
  cfg.staleness = parse_staleness_policy("random_in_box", 2);
  cfg.step = StepSizeRule::constant(spd_gamma_bounds(obj.problem().A), 2.0);
  cfg.p0 = Point(static_cast<std::size_t>(n), 1.0);
  cfg.horizon = 20.0;

  std::size_t events = 0;
  for (auto _ : state) {
    const Trace tr = run(cfg);
    events += tr.size();
    benchmark::DoNotOptimize(tr.final_point());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}

void bench_window_box(benchmark::State& state) {
  const int n = 16;
  SpdObjective obj(SpdProblem::from(dominant_spd(n, 9), Eigen::VectorXd::Zero(n)));
  RunConfig cfg;
  cfg.objective = &obj;
  cfg.schedule = SchedulePolicy::random_gap(0.3);
  cfg.schedule_seed = 3;
  cfg.staleness = parse_staleness_policy("fresh", 0);
  cfg.step = StepSizeRule::constant(spd_gamma_bounds(obj.problem().A), 2.0);
  cfg.p0 = Point(n, 1.0);
  cfg.horizon = 50.0;
  const Trace tr = run(cfg);

  Rng rng(11);
  for (auto _ : state) {
    const double t1 = rng.uniform(0.0, 49.0);
    const CoordBox box = window_box(tr, static_cast<int>(rng.below(n)), t1, t1 + 1.0, 1.0);
    benchmark::DoNotOptimize(box.lo.data());
  }
}

}  // namespace

BENCHMARK(bench_engine_events)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_window_box);

BENCHMARK_MAIN();
