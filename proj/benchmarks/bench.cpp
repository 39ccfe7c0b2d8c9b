#include <benchmark/benchmark.h>

#include "stcast/arima.hpp"
#include "stcast/rng.hpp"
#include "stcast/synth.hpp"
#include "stcast/train.hpp"

using namespace stcast;

namespace {

std::vector<StepInput> bench_inputs(int steps, Rng& rng) {
  std::vector<StepInput> out;
  for (int t = 0; t < steps; ++t) {
    StepInput in;
    in.own_prev = rng.uniform(0, 1);
    for (double& v : in.neighbor_top) v = rng.uniform(0, 1);
    in.neighbor_sum = rng.uniform(0, 3);
    std::array<double, 4> climate;
    for (double& v : climate) v = rng.uniform(0, 1);
    in.climate = climate;
    in.month_id = t % 12;
    out.push_back(in);
  }
  return out;
}

ModelParams bench_params(int hidden, Rng& rng) {
  ModelParams p = ModelParams::zeros(ModelVariant::integrated, hidden, 4);
  for (auto& [name, span] : tensors(p)) {
    for (double& v : span) v = rng.uniform(-0.3, 0.3);
  }
  return p;
}

}  // namespace

static void BM_Forward(benchmark::State& state) {
  Rng rng(1);
  const ModelParams p = bench_params(static_cast<int>(state.range(0)), rng);
  const auto inputs = bench_inputs(49, rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_forward(p, inputs));
  }
}
BENCHMARK(BM_Forward)->Arg(8)->Arg(16)->Arg(32);

static void BM_Backward(benchmark::State& state) {
  Rng rng(2);
  const ModelParams p = bench_params(static_cast<int>(state.range(0)), rng);
  const auto inputs = bench_inputs(49, rng);
  std::vector<double> targets;
  for (int i = 0; i < 49; ++i) targets.push_back(rng.uniform(0, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward(p, inputs, targets));
  }
}
BENCHMARK(BM_Backward)->Arg(8)->Arg(16)->Arg(32);

static void BM_TrainEpochs(benchmark::State& state) {
  SynthConfig cfg;
  cfg.regions = 3;
  cfg.months = 69;
  cfg.train_months = 51;
  cfg.seed = 3;
  const SynthPanel sp = gen_panel(cfg);
  const TransformState ts = TransformState::fit(sp.panel);
  TrainConfig tc;
  tc.epochs = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_region(sp.panel, 0, tc, ts));
  }
}
BENCHMARK(BM_TrainEpochs)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

static void BM_ArimaFit(benchmark::State& state) {
  const auto path = gen_arima_path(0.0, std::vector<double>{0.5, -0.3},
                                   std::vector<double>{0.4}, 1,
                                   static_cast<int>(state.range(0)), 1.0, 5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_arima(path, ArimaOrder{2, 1, 1}, 5));
  }
}
BENCHMARK(BM_ArimaFit)->Arg(51)->Arg(200)->Arg(500)
    ->Unit(benchmark::kMillisecond);

static void BM_TopNeighbors(benchmark::State& state) {
  SynthConfig cfg;
  cfg.regions = static_cast<int>(state.range(0));
  cfg.months = 40;
  cfg.train_months = 30;
  cfg.pattern = AdjacencyPattern::complete;
  const SynthPanel sp = gen_panel(cfg);
  const auto raw = raw_counts(sp.panel);
  for (auto _ : state) {
    for (int r = 0; r < cfg.regions; ++r) {
      benchmark::DoNotOptimize(top_neighbors(sp.panel, r, 20, raw));
    }
  }
}
BENCHMARK(BM_TopNeighbors)->Arg(5)->Arg(25);

BENCHMARK_MAIN();
