#include <benchmark/benchmark.h>

#include <random>

#include "sentitrade/neural_net.hpp"

using namespace sentitrade::nn;

namespace {

std::vector<double> input() { return {50.0, 0.3, 0.01, -0.2, 0.04, 0.1}; }

void BM_Forward(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const QModel q = state.range(0) ? QModel(make_dueling_q_network(rng)) : QModel(make_q_network(rng));
  const auto x = input();
  for (auto _ : state) benchmark::DoNotOptimize(q.forward(x));
}
BENCHMARK(BM_Forward)->Arg(0)->Arg(1);

// One 32-sample mini-batch gradient.
void BM_BatchGradient(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const QModel q = state.range(0) ? QModel(make_dueling_q_network(rng)) : QModel(make_q_network(rng));
  auto g = q.zero_gradients();
  const auto x = input();
  for (auto _ : state) {
    for (int i = 0; i < 32; ++i) benchmark::DoNotOptimize(q.accumulate_gradient(x, i % 3, 1.0, g, 1.0 / 32));
  }
}
BENCHMARK(BM_BatchGradient)->Arg(0)->Arg(1);

void BM_AdamStep(benchmark::State& state) {
  std::mt19937_64 rng(3);
  QModel q(make_q_network(rng));
  auto blocks = q.parameter_blocks();
  auto adam = AdamState::for_blocks(blocks);
  auto g = q.zero_gradients();
  for (auto& b : g) std::fill(b.begin(), b.end(), 1e-3);
  for (auto _ : state) adam_step(blocks, g, adam);
}
BENCHMARK(BM_AdamStep);

}  // namespace
BENCHMARK_MAIN();
