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

#include "crowdcount/rng.hpp"
#include "crowdcount/tensor.hpp"

namespace {

using crowd::ConvSpec;
using crowd::Rng;
using crowd::Tensor;

Tensor random_tensor(Rng& rng, int n, int c, int h, int w) {
  Tensor t(n, c, h, w);
  for (float& v : t.data) v = static_cast<float>(rng.uniform01() - 0.5);
  return t;
}

void ConvForward(benchmark::State& state) {
  const int dilation = static_cast<int>(state.range(0));
  Rng rng(1);
  const Tensor input = random_tensor(rng, 1, 16, 64, 64);
  ConvSpec spec;
  spec.kernel = random_tensor(rng, 16, 16, 3, 3);
  spec.bias.assign(16, 0.1f);
  spec.dilation = dilation;
  spec.padding = dilation;
  for (auto _ : state) {
    Tensor out = conv2d_dilated(input, spec);
    benchmark::DoNotOptimize(out.data.data());
  }
  state.SetItemsProcessed(state.iterations() * input.size() * 16 * 9);
}
BENCHMARK(ConvForward)->Arg(1)->Arg(2)->Arg(4);

void ConvBackward(benchmark::State& state) {
  Rng rng(2);
  const Tensor input = random_tensor(rng, 1, 16, 64, 64);
  ConvSpec spec;
  spec.kernel = random_tensor(rng, 16, 16, 3, 3);
  spec.bias.assign(16, 0.1f);
  spec.dilation = 2;
  spec.padding = 2;
  const Tensor upstream = random_tensor(rng, 1, 16, 64, 64);
  for (auto _ : state) {
    crowd::ConvGrads grads = conv2d_backward(input, spec, upstream);
    benchmark::DoNotOptimize(grads.input.data.data());
  }
  state.SetItemsProcessed(state.iterations() * input.size() * 16 * 9);
}
BENCHMARK(ConvBackward);

void MaxPool(benchmark::State& state) {
  Rng rng(3);
  const Tensor input = random_tensor(rng, 1, 32, 64, 64);
  for (auto _ : state) {
    crowd::PoolResult pooled = maxpool2(input);
    benchmark::DoNotOptimize(pooled.output.data.data());
  }
  state.SetItemsProcessed(state.iterations() * input.size());
}
BENCHMARK(MaxPool);

void BilinearResize(benchmark::State& state) {
  Rng rng(4);
  const Tensor input = random_tensor(rng, 1, 1, 48, 48);
  for (auto _ : state) {
    Tensor out = bilinear_resize(input, 64, 64);
    benchmark::DoNotOptimize(out.data.data());
  }
}
BENCHMARK(BilinearResize);

}  // namespace

BENCHMARK_MAIN();
