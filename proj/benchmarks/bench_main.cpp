#include <benchmark/benchmark.h>

#include "gridxp/harness.hpp"

namespace {

using namespace gridxp;

void BM_ForwardLinearEgo(benchmark::State& state) {
  Rng rng(1);
  PolicyModel model(HeadKind::kLinear, Representation::kEgocentric, rng);
  const GameInstance inst{{4, 4}, {1, 1}};
  const ObjectGrid grid = model.encode(inst, inst.start);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(grid));
  }
}
BENCHMARK(BM_ForwardLinearEgo);

void BM_ForwardMirror(benchmark::State& state) {
  Rng rng(1);
  PolicyModel model(HeadKind::kMirror, Representation::kEgocentric, rng);
  const GameInstance inst{{4, 4}, {1, 1}};
  const ObjectGrid grid = model.encode(inst, inst.start);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.forward(grid));
  }
}
BENCHMARK(BM_ForwardMirror);

void BM_BackwardLinearEgo(benchmark::State& state) {
  Rng rng(1);
  PolicyModel model(HeadKind::kLinear, Representation::kEgocentric, rng);
  const GameInstance inst{{4, 4}, {1, 1}};
  const ObjectGrid grid = model.encode(inst, inst.start);
  std::vector<double> grad(model.param_count());
  const std::array<double, 4> dv{0.1, -0.2, 0.3, -0.4};
  for (auto _ : state) {
    model.backward(grid, dv, grad);
    benchmark::DoNotOptimize(grad.data());
  }
}
BENCHMARK(BM_BackwardLinearEgo);

void BM_TrainEpochMirror(benchmark::State& state) {
  TrainConfig config;
  config.epochs = 1;
  config.seed = 5;
  Rng rng(5);
  const InstanceSet set = generate_instance_set(4, 10, rng);
  PolicyModel model(config.head, config.representation, rng);
  AdamOptimizer opt(model.param_count(), config.learning_rate);
  ReplayStore store;
  int next = 0;
  while (!store.at_capacity()) {
    store.push(generate_game(set.train[next % set.train.size()], model, config, rng));
    ++next;
  }
  int epoch = 0;
  for (auto _ : state) {
    train_epoch(store, model, opt, config, epoch++, rng);
  }
}
BENCHMARK(BM_TrainEpochMirror)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
