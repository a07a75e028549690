#include "bench_data.hpp"

#include "cminet/cclasso.hpp"
#include "cminet/cmimn.hpp"
#include "cminet/correlation.hpp"
#include "cminet/methods.hpp"
#include "cminet/sparcc.hpp"
#include "cminet/sparse_graph.hpp"

#include <benchmark/benchmark.h>

using namespace cminet;

static void BM_GraphicalLasso(benchmark::State& state) {
  const auto p = state.range(0);
  const Eigen::MatrixXd s = bench::correlation(bench::chain(4 * p, p, 1));
  const double lambda = 0.5 * lambda_path(s, 1, 0.5).values[0];
  for (auto _ : state) benchmark::DoNotOptimize(graphical_lasso(s, lambda).omega.data());
}
BENCHMARK(BM_GraphicalLasso)->Arg(10)->Arg(30)->Arg(60)->Unit(benchmark::kMillisecond);

static void BM_LassoQuadratic(benchmark::State& state) {
  const auto p = state.range(0);
  const Eigen::MatrixXd q = bench::correlation(bench::gaussian(3 * p, p, 2));
  const Eigen::VectorXd c = q.col(0);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(p);
  for (auto _ : state) {
    b.setZero();
    benchmark::DoNotOptimize(lasso_quadratic(q, c, 0.05, b, 1e-6, 500));
  }
}
BENCHMARK(BM_LassoQuadratic)->Arg(20)->Arg(100);

static void BM_KendallTau(benchmark::State& state) {
  const auto n = state.range(0);
  const Eigen::MatrixXd x = bench::chain(n, 2, 3);
  for (auto _ : state) benchmark::DoNotOptimize(kendall_tau_b(x.col(0), x.col(1)));
  state.SetComplexityN(n);
}
BENCHMARK(BM_KendallTau)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void BM_Sparcc(benchmark::State& state) {
  const auto table = bench::counts(200, state.range(0), 4);
  for (auto _ : state) benchmark::DoNotOptimize(sparcc_fit(table, SparccParams{}, 4).values.data());
}
BENCHMARK(BM_Sparcc)->Arg(20)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_SpiecEasiMb(benchmark::State& state) {
  const auto table = bench::counts(200, state.range(0), 5);
  const auto params = SpiecEasiParams::defaults(SpiecEasiMode::mb);
  for (auto _ : state) benchmark::DoNotOptimize(spieceasi_fit(table, params, 5, 1));
}
BENCHMARK(BM_SpiecEasiMb)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_Gcoda(benchmark::State& state) {
  const auto table = bench::counts(200, state.range(0), 6);
  for (auto _ : state) benchmark::DoNotOptimize(gcoda_fit(table, GcodaParams{}, 1));
}
BENCHMARK(BM_Gcoda)->Arg(20)->Unit(benchmark::kMillisecond);

static void BM_Cclasso(benchmark::State& state) {
  const auto table = bench::counts(120, state.range(0), 7);
  for (auto _ : state) benchmark::DoNotOptimize(cclasso_fit(table, CclassoParams{}, 7, 1));
}
BENCHMARK(BM_Cclasso)->Arg(15)->Unit(benchmark::kMillisecond);

static void BM_CmimnStages(benchmark::State& state) {
  const Eigen::MatrixXd x = bench::chain(500, state.range(0), 8);
  for (auto _ : state) benchmark::DoNotOptimize(cmimn_stages(x, 0.7, 0.95).stage2.data());
}
BENCHMARK(BM_CmimnStages)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);
