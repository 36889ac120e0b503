#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "tmcf/cluster.hpp"
#include "tmcf/gru.hpp"
#include "tmcf/repr.hpp"

using namespace tmcf;

namespace {

FlowSet random_flows(std::size_t n_nodes, std::size_t steps, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  FlowSet flows(n_nodes, steps);
  for (std::size_t m = 0; m < flows.flow_count(); ++m) {
    for (double& v : flows.flow(m)) v = u(rng);
  }
  return flows;
}

// Pairwise JSD over histograms for an N-node matrix (M = N^2 flows).
void BM_JsdMatrix(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto flows = random_flows(n, 2016, 1);
  ReprOptions opts;
  const auto reps = represent(flows, {0, flows.steps()}, 300, opts);
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_dissimilarity(reps, Metric::Jsd));
  state.SetComplexityN(static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_JsdMatrix)->Arg(4)->Arg(12)->Arg(23)->Unit(benchmark::kMillisecond);

void BM_Hac(benchmark::State& state) {
  const auto m = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DissimilarityMatrix d(m, Metric::Euclidean);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) d(i, j) = d(j, i) = u(rng);
  }
  const auto linkage = state.range(1) == 0 ? Linkage::Complete : Linkage::Average;
  for (auto _ : state) benchmark::DoNotOptimize(hac(d, linkage));
}
BENCHMARK(BM_Hac)->Args({144, 0})->Args({144, 1})->Args({529, 0})->Args({529, 1})->Unit(benchmark::kMillisecond);

void BM_Welch(benchmark::State& state) {
  const auto flows = random_flows(1, static_cast<std::size_t>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(psd_rep(flows.flow(0), 12.0));
}
BENCHMARK(BM_Welch)->Arg(2016)->Arg(8064)->Arg(48384);

// One forward/backward pass over a batch of 32 windows of 10 steps.
void BM_GruLossAndGradient(benchmark::State& state) {
  const auto width = static_cast<std::size_t>(state.range(0));
  const auto hidden = static_cast<std::size_t>(state.range(1));
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  WindowedDataset ds;
  ds.samples = 32;
  ds.history = 10;
  ds.width = width;
  ds.inputs.resize(ds.samples * ds.history * width);
  ds.targets.resize(ds.samples * width);
  for (double& v : ds.inputs) v = u(rng);
  for (double& v : ds.targets) v = u(rng);
  GruModel model(width, hidden, width);
  model.init_uniform(5);
  std::vector<std::size_t> idx(ds.samples);
  std::iota(idx.begin(), idx.end(), 0);
  Eigen::VectorXd grad;
  for (auto _ : state) benchmark::DoNotOptimize(gru_loss(model, ds, idx, &grad));
}
BENCHMARK(BM_GruLossAndGradient)->Args({1, 16})->Args({16, 16})->Args({1, 200})->Args({144, 200})
    ->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
