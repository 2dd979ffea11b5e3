#include <benchmark/benchmark.h>

#include "agdlab/linear_systems.hpp"
#include "agdlab/monitor.hpp"
#include "agdlab/rng.hpp"

using namespace agdlab;

namespace {

void bench_monitor_pass(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Rng rng(3);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a(i, j) = a(j, i) = rng.uniform(-1.0, 1.0);
  for (int i = 0; i < n; ++i) a(i, i) = 10.0 * a.row(i).cwiseAbs().sum() + 1.0;
  SpdObjective obj(SpdProblem::from(a, Eigen::VectorXd::Zero(n)));

  RunConfig cfg;
  cfg.objective = &obj;
  cfg.schedule = SchedulePolicy::random_gap(0.3);
  cfg.schedule_seed = 1;
  cfg.staleness = parse_staleness_policy("random_in_box", 2);
  cfg.step = StepSizeRule::constant(spd_gamma_bounds(a), 2.0);
  cfg.p0 = Point(static_cast<std::size_t>(n), 1.0);
  cfg.horizon = 25.0;
  const Trace tr = run(cfg);
  const ControlParams params = quadratic_control_params(a.cwiseAbs(), spd_gamma_bounds(a));

  std::size_t events = 0;
  for (auto _ : state) {
    const MonitorResult res = run_monitor(tr, obj, params);
    events += res.series.events.size();
    benchmark::DoNotOptimize(res.series.events.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}

}  // namespace

BENCHMARK(bench_monitor_pass)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
