#include "bench_data.hpp"

#include "cminet/consensus.hpp"
#include "cminet/render.hpp"

#include <benchmark/benchmark.h>

using namespace cminet;

namespace {

std::vector<BinaryNetwork> random_networks(Eigen::Index p, int m, double density) {
  std::mt19937_64 rng(9);
  std::bernoulli_distribution edge(density);
  const auto taxa = bench::names("t", p);
  std::vector<BinaryNetwork> out;
  for (int k = 0; k < m; ++k) {
    Adjacency a = Adjacency::Zero(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
      for (Eigen::Index j = i + 1; j < p; ++j) a(i, j) = a(j, i) = edge(rng);
    }
    out.emplace_back(a, taxa, "m" + std::to_string(k));
  }
  return out;
}

}  // namespace

static void BM_BuildConsensus(benchmark::State& state) {
  const auto nets = random_networks(state.range(0), 10, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(build_consensus(nets).weights.data());
}
BENCHMARK(BM_BuildConsensus)->Arg(100)->Arg(500);

static void BM_ThresholdSweep(benchmark::State& state) {
  const auto c = build_consensus(random_networks(state.range(0), 10, 0.05));
  for (auto _ : state) benchmark::DoNotOptimize(threshold_sweep(c));
}
BENCHMARK(BM_ThresholdSweep)->Arg(100)->Arg(500);

static void BM_HammingMatrix(benchmark::State& state) {
  const auto nets = random_networks(state.range(0), 10, 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(hamming_matrix(nets).data());
}
BENCHMARK(BM_HammingMatrix)->Arg(100)->Arg(500);

static void BM_RenderNetwork(benchmark::State& state) {
  const auto c = build_consensus(random_networks(state.range(0), 10, 0.05));
  const auto net = threshold_network(c, 0);
  for (auto _ : state) benchmark::DoNotOptimize(render_network_svg(net, 42));
}
BENCHMARK(BM_RenderNetwork)->Arg(50)->Arg(150)->Unit(benchmark::kMillisecond);
