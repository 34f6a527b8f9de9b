#include <benchmark/benchmark.h>

#include "metasymnet/benchmarks.hpp"
#include "metasymnet/evolution.hpp"
#include "metasymnet/meta_network.hpp"
#include "metasymnet/training.hpp"

namespace {

using namespace metasymnet;

Matrix probe_inputs(int rows, int k, std::uint64_t seed) {
  return sample(SamplingSpec::uniform(-1.0, 1.0, rows, seed), k);
}

void BM_Forward(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const MetaNetwork net = MetaNetwork::init(2, InitSpec{depth}, 7);
  const Matrix X = probe_inputs(64, 2, 11);
  for (auto _ : state) {
    auto out = net.forward(X);
    benchmark::DoNotOptimize(out.first.data());
  }
}
BENCHMARK(BM_Forward)->Arg(2)->Arg(4)->Arg(6);

void BM_ForwardBackward(benchmark::State& state) {
  const int depth = static_cast<int>(state.range(0));
  const MetaNetwork net = MetaNetwork::init(2, InitSpec{depth}, 7);
  const Matrix X = probe_inputs(64, 2, 11);
  std::vector<double> y(64, 0.5);
  for (auto _ : state) {
    auto [yhat, tape] = net.forward(X);
    auto grads = net.backward(tape, y, 0.2);
    benchmark::DoNotOptimize(grads.z.data());
  }
}
BENCHMARK(BM_ForwardBackward)->Arg(2)->Arg(4)->Arg(6);

void BM_Extract(benchmark::State& state) {
  const MetaNetwork net = MetaNetwork::init(2, InitSpec{4}, 7);
  const Matrix X = probe_inputs(64, 2, 11);
  for (auto _ : state) {
    auto extracted = extract_expression(net, X);
    benchmark::DoNotOptimize(extracted.first.node_count());
  }
}
BENCHMARK(BM_Extract);

void BM_RefineConstants(benchmark::State& state) {
  const BenchmarkEntry& entry = get_benchmark("Nguyen-1");
  const Dataset data = realize(entry, 3);
  const Expression tmpl = Expression::parse_prefix("+ * x1 * x1 x1 + * x1 x1 x1", 1);
  for (auto _ : state) {
    Expression refined = refine_constants(tmpl, data, 100, 0.01);
    benchmark::DoNotOptimize(refined.node_count());
  }
}
BENCHMARK(BM_RefineConstants);

void BM_FitOuterIteration(benchmark::State& state) {
  const BenchmarkEntry& entry = get_benchmark("Nguyen-1");
  const Dataset data = realize(entry, 3);
  Hyperparams hyper;
  hyper.max_outer_iters = 1;
  hyper.time_budget_s = 1e9;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    FitReport report = alternating_fit(data, hyper, seed++);
    benchmark::DoNotOptimize(report.evaluation_count);
  }
}
BENCHMARK(BM_FitOuterIteration);

}  // namespace

BENCHMARK_MAIN();
