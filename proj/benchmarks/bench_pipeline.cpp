// Copyright 2026 The crowdcount Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <cmath>

#include "crowdcount/ga_search.hpp"
#include "crowdcount/ground_truth.hpp"
#include "crowdcount/network.hpp"
#include "crowdcount/rng.hpp"
#include "crowdcount/training.hpp"

namespace {

using namespace crowd;

Annotation random_heads(int size, int count, std::uint64_t seed) {
  Rng rng(seed);
  Annotation annotation;
  annotation.height = size;
  annotation.width = size;
  for (int i = 0; i < count; ++i) {
    annotation.points.push_back(
        {static_cast<float>(8 + rng.uniform01() * (size - 17)),
         static_cast<float>(8 + rng.uniform01() * (size - 17))});
  }
  return annotation;
}

void DensityMapGeneration(benchmark::State& state) {
  const Annotation annotation = random_heads(128, 40, 7);
  for (auto _ : state) {
    DensityMap map = generate_density_map(annotation);
    benchmark::DoNotOptimize(map.values.data());
  }
  state.SetItemsProcessed(state.iterations() * 40);
}
BENCHMARK(DensityMapGeneration);

void DeskForward(benchmark::State& state) {
  const std::vector<int> genes = {2, 2, 2, 2};
  const ModelConfig config = make_desk_config(genes);
  const ModelWeights weights = init_weights(config, 1, 0.1);
  Rng rng(2);
  Tensor input(1, 1, 64, 64);
  for (float& v : input.data) v = static_cast<float>(rng.uniform01());
  for (auto _ : state) {
    Tensor out = forward(config, weights, input);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(DeskForward);

void DeskTrainStep(benchmark::State& state) {
  const std::vector<int> genes = {2, 2, 2, 2};
  const ModelConfig config = make_desk_config(genes);
  ModelWeights weights = init_weights(config, 1, 0.1);
  Rng rng(3);
  Tensor input(1, 1, 64, 64);
  for (float& v : input.data) v = static_cast<float>(rng.uniform01());
  Tensor target(1, 1, 8, 8);
  for (float& v : target.data) v = static_cast<float>(rng.uniform01());

  ForwardCache cache;
  for (auto _ : state) {
    const Tensor pred = forward(config, weights, input, cache);
    const LossResult loss = euclidean_loss(pred, target);
    const std::vector<float> grads = backward(config, weights, cache, loss.grad);
    sgd_step(weights.values, grads, 1e-5);
    benchmark::DoNotOptimize(weights.values.data());
  }
}
BENCHMARK(DeskTrainStep);

void GaToySearch(benchmark::State& state) {
  auto toy = [](const Chromosome& c, int, int) {
    int sum = 0;
    for (int gene : c.genes) sum += gene;
    return std::abs(static_cast<double>(sum) - 14.0);
  };
  std::uint64_t seed = 0;
  for (auto _ : state) {
    GaConfig config;
    config.seed = seed++;
    GaResult result = run_ga(config, toy);
    benchmark::DoNotOptimize(result.best_mae);
  }
}
BENCHMARK(GaToySearch);

}  // namespace

BENCHMARK_MAIN();
