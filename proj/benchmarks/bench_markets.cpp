#include <benchmark/benchmark.h>

#include "agdlab/markets.hpp"
#include "agdlab/rng.hpp"

using namespace agdlab;

namespace {

std::shared_ptr<CesFisherMarket> market(int goods, int buyers) {
  Rng rng(5);
  CesMarket m;
  m.goods = goods;
  for (int i = 0; i < buyers; ++i) {
    CesBuyer b;
    b.money = rng.uniform(0.5, 1.5);
    b.rho = -rng.uniform(0.5, 3.0);
    for (int j = 0; j < goods; ++j) b.weights.push_back(rng.uniform(0.2, 1.2));
    m.buyers.push_back(std::move(b));
  }
  return std::make_shared<CesFisherMarket>(m);
}

void bench_excess_demand(benchmark::State& state) {
  auto m = market(static_cast<int>(state.range(0)), 5);
  Point p(static_cast<std::size_t>(m->goods()), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(m->excess_demand(p));
}

void bench_tatonnement_run(benchmark::State& state) {
  auto m = market(8, 4);
  TatonnementOptions opts;
  opts.schedule = SchedulePolicy::random_gap(0.5);
  opts.schedule_seed = 1;
  opts.staleness = parse_staleness_policy("random_in_box", 2);
  opts.horizon = 50.0;
  opts.monitor = false;
  Point p0(8, 1.0);
  std::size_t events = 0;
  for (auto _ : state) {
    const auto res = run_tatonnement(m, MarketMode::kCes, p0, opts);
    events += res.trace.size();
    benchmark::DoNotOptimize(res.final_state.p.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(events));
}

}  // namespace

BENCHMARK(bench_excess_demand)->Arg(4)->Arg(16)->Arg(64);
BENCHMARK(bench_tatonnement_run)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
