#include <benchmark/benchmark.h>

#include "dfx/analysis.hpp"
#include "dfx/construct.hpp"
#include "dfx/data_io.hpp"
#include "dfx/learn.hpp"

using namespace dfx;

namespace {

LabeledDataset sim_data(int n, std::uint64_t count) {
  SimulationSpec spec;
  spec.n = n;
  spec.sample_count = count;
  spec.seed = 1;
  return generate_simulation(spec);
}

void BM_TreeEval(benchmark::State& state) {
  const LabeledDataset d = sim_data(4, 20000);
  TrainConfig cfg;
  cfg.max_leaves = static_cast<std::size_t>(state.range(0));
  const Tree t = train_tree(d, cfg);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(t.eval(d.row(i)));
    i = (i + 1) % d.size();
  }
}
BENCHMARK(BM_TreeEval)->Arg(16)->Arg(256)->Arg(4096);

void BM_TrainTree(benchmark::State& state) {
  const LabeledDataset d = sim_data(4, static_cast<std::uint64_t>(state.range(0)));
  TrainConfig cfg;
  cfg.max_depth = 10;
  for (auto _ : state) benchmark::DoNotOptimize(train_tree(d, cfg));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainTree)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_TrainForest(benchmark::State& state) {
  const LabeledDataset d = sim_data(4, 20000);
  TrainConfig cfg;
  cfg.n_trees = 9;
  cfg.max_depth = 8;
  for (auto _ : state) benchmark::DoNotOptimize(train_forest(d, cfg));
}
BENCHMARK(BM_TrainForest)->Unit(benchmark::kMillisecond);

void BM_BuildParity(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_parity_deeptree(4, n));
}
BENCHMARK(BM_BuildParity)->Arg(2)->Arg(8)->Arg(64);

void BM_ParityDeepTreeEval(benchmark::State& state) {
  const DeepTree dt = build_parity_deeptree(4, 8);
  const Point x{1, 2, 3, 4, 4, 3, 2, 1};
  for (auto _ : state) benchmark::DoNotOptimize(dt.eval(std::span<const Coord>(x)));
}
BENCHMARK(BM_ParityDeepTreeEval);

void BM_Oracle(benchmark::State& state) {
  const LatticeSpace space(static_cast<int>(state.range(0)), 2);
  OracleOptions options;
  options.max_leaves = static_cast<std::size_t>(space.size());
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        tree_complexity_oracle(space, Concept::parity(), LatticeDistribution::uniform(), 0.0, options));
  }
}
BENCHMARK(BM_Oracle)->Arg(2)->Arg(3)->Unit(benchmark::kMillisecond);

void BM_GiniTrace(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const LatticeSpace space(n, 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gini_split_trace(space, LatticeDistribution::product(), Concept::parity(), n));
  }
}
BENCHMARK(BM_GiniTrace)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
