#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "ammlab/auditors.hpp"
#include "ammlab/mechanisms.hpp"
#include "random_batches.hpp"

using namespace ammlab;

namespace {

std::vector<testsupport::RandomCase> cases(int max_n, bool buy_x_only, int count = 256) {
  std::mt19937_64 rng(99);
  std::vector<testsupport::RandomCase> out;
  for (int i = 0; i < count; ++i) out.push_back(testsupport::random_case(rng, max_n, buy_x_only));
  return out;
}

template <BatchResult (*M)(const Curve&, const PoolState&, std::span<const Order>, const Tolerances&)>
void run_mechanism(benchmark::State& state, bool buy_x_only) {
  const auto cs = cases(static_cast<int>(state.range(0)), buy_x_only);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& c = cs[i++ % cs.size()];
    const ConstantProduct curve = ConstantProduct::through(c.pool);
    benchmark::DoNotOptimize(M(curve, c.pool, c.batch, {}));
  }
}

void BM_Mechanism1(benchmark::State& s) { run_mechanism<mechanism1>(s, false); }
void BM_Mechanism2(benchmark::State& s) { run_mechanism<mechanism2>(s, false); }
void BM_SingleSideUniform(benchmark::State& s) { run_mechanism<single_side_uniform>(s, true); }

void BM_ArbitrageSearch(benchmark::State& state) {
  const auto cs = cases(static_cast<int>(state.range(0)), false, 64);
  std::vector<BatchResult> results;
  for (const auto& c : cs) results.push_back(mechanism2(ConstantProduct::through(c.pool), c.pool, c.batch));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(find_arbitrage_subset(results[i++ % results.size()]));
}

void BM_IcAuditMechanism1(benchmark::State& state) {
  const PoolState pool(100.0, 100.0);
  const ConstantProduct curve = ConstantProduct::through(pool);
  const std::vector<Order> others{Order{OrderType::BuyX, ExtRate::finite(2.5), 20.0, 1.0},
                                  Order{OrderType::SellY, ExtRate::finite(1.5), 30.0, 3.0}};
  const IntrinsicType t{OrderType::BuyX, ExtRate::finite(2.0), 15.0, 2.0};
  const auto preset = static_cast<GridPreset>(state.range(0));
  const DeviationGrid grid = make_grid(preset, 1.0, t.qty);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        ic_audit(mechanism1, curve, pool, others, t, StrategyModel::WeakFairSequencing, grid));
  }
}

}  // namespace

BENCHMARK(BM_Mechanism1)->Arg(2)->Arg(6)->Arg(20);
BENCHMARK(BM_Mechanism2)->Arg(2)->Arg(6)->Arg(20);
BENCHMARK(BM_SingleSideUniform)->Arg(2)->Arg(6)->Arg(20);
BENCHMARK(BM_ArbitrageSearch)->Arg(6)->Arg(12);
BENCHMARK(BM_IcAuditMechanism1)
    ->Arg(static_cast<int>(GridPreset::Coarse))
    ->Arg(static_cast<int>(GridPreset::Default))
    ->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
