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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include <stdexcept>

#include <doctest.h>

#include "crowdcount/data_io.hpp"
#include "crowdcount/network.hpp"
#include "crowdcount/training.hpp"
#include "oracles.hpp"

using namespace crowd;

namespace {

int count_kind(const std::vector<LayerSpec>& layers, LayerKind kind) {
  return static_cast<int>(
      std::count_if(layers.begin(), layers.end(),
                    [kind](const LayerSpec& layer) { return layer.kind == kind; }));
}

std::filesystem::path test_data_dir() {
  return std::filesystem::path(CROWDCOUNT_TEST_DATA_DIR);
}

}  // namespace

TEST_SUITE("network") {

TEST_CASE("weight init is seed-deterministic with zero biases") {
  const std::vector<int> genes = {2, 2, 2, 2};
  const ModelConfig config = make_desk_config(genes);
  const ModelWeights a = init_weights(config, 42);
  const ModelWeights b = init_weights(config, 42);
  CHECK(a.values == b.values);

  const ModelWeights c = init_weights(config, 43);
  CHECK(a.values != c.values);
  CHECK(a.values.size() == parameter_count(config));
}

TEST_CASE("weight init matches the requested spread") {
  // One wide layer gives a million-draw sample in a single store.
  ModelConfig config;
  config.in_channels = 64;
  config.front_end = {
      LayerSpec::conv(1740, 3, 1, 1), LayerSpec::relu(),
      LayerSpec::pool(), LayerSpec::pool(), LayerSpec::pool(),
  };
  config.back_end = {LayerSpec::conv(4, 3, 2, 2)};
  config.head = LayerSpec::conv(1, 1, 1, 0);

  const ModelWeights weights = init_weights(config, 7);
  const std::size_t draws = static_cast<std::size_t>(1740) * 64 * 9;
  REQUIRE(draws > 1000000);
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    sum += weights.values[i];
    sum_sq += static_cast<double>(weights.values[i]) * weights.values[i];
  }
  const double mean = sum / draws;
  const double std_dev = std::sqrt(sum_sq / draws - mean * mean);
  CHECK(std_dev >= 0.0099);
  CHECK(std_dev <= 0.0101);
}

TEST_CASE("zero weights produce a zero map") {
  const std::vector<int> genes = {2, 3, 2, 3};
  const ModelConfig config = make_desk_config(genes);
  ModelWeights weights;
  weights.values.assign(parameter_count(config), 0.0f);
  Rng rng(5);
  const Tensor input = oracle::random_tensor(rng, 1, 1, 32, 32, 0.0, 1.0);
  const Tensor out = forward(config, weights, input);
  CHECK(std::all_of(out.data.begin(), out.data.end(), [](float v) { return v == 0.0f; }));
}

TEST_CASE("desk model maps 64x64 input to an 8x8 single-channel map") {
  const std::vector<int> genes = {2, 2, 2, 2};
  const ModelConfig config = make_desk_config(genes);
  const ModelWeights weights = init_weights(config, 1);
  Rng rng(2);
  const Tensor input = oracle::random_tensor(rng, 2, 1, 64, 64, 0.0, 1.0);
  const Tensor out = forward(config, weights, input);
  CHECK(out.batch == 2);
  CHECK(out.channels == 1);
  CHECK(out.height == 8);
  CHECK(out.width == 8);
}

TEST_CASE("back end and head never change the spatial extent") {
  for (const std::vector<int>& genes :
       {std::vector<int>{1, 1, 1, 1}, {2, 3, 4, 5}, {5, 5, 5, 5}}) {
    const ModelConfig config = make_desk_config(genes);
    const ModelWeights weights = init_weights(config, 3);
    const Tensor input(1, 1, 40, 64, 0.25f);
    const Tensor out = forward(config, weights, input);
    CHECK(out.height == 5);
    CHECK(out.width == 8);
  }
}

TEST_CASE("fixed seed and input reproduce the recorded golden output") {
  const std::vector<int> genes = {2, 2, 2, 2};
  const ModelConfig config = make_desk_config(genes);
  const ModelWeights weights = init_weights(config, 42);
  Rng rng(7);
  const Tensor input = oracle::random_tensor(rng, 1, 1, 64, 64, 0.0, 1.0);
  const Tensor out = forward(config, weights, input);
  const DensityMap map = density_from_output(out, 0, 8);

  const std::filesystem::path golden_path = test_data_dir() / "golden_forward.dmap";
  if (!std::filesystem::exists(golden_path)) {
    std::filesystem::create_directories(golden_path.parent_path());
    write_dmap(golden_path, map);
    WARN_MESSAGE(false, "golden file was missing; wrote ", golden_path.string());
    return;
  }
  const DensityMap golden = read_dmap(golden_path);
  REQUIRE(golden.height == map.height);
  REQUIRE(golden.width == map.width);
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    REQUIRE(std::abs(map.values[i] - golden.values[i]) <= 1e-6);
  }
}

TEST_CASE("paper-scale shape: twelve convs, three pools, eight back-end layers") {
  const ModelConfig config = make_paper_scale_config();
  CHECK(count_kind(config.front_end, LayerKind::Conv) == 12);
  CHECK(count_kind(config.front_end, LayerKind::MaxPool2) == 3);
  CHECK(config.back_end.size() == 8);
  CHECK(config.back_end[0].out_channels == 1024);
  CHECK(config.back_end[1].out_channels == 1024);
  CHECK(config.back_end.back().out_channels == 64);
  CHECK(config.head.kernel == 1);
  CHECK_NOTHROW(validate(config));
}

TEST_CASE("paper-scale config runs forward at 1/8 resolution") {
  const ModelConfig config = make_paper_scale_config();
  const ModelWeights weights = init_weights(config, 5);
  const Tensor input(1, 1, 16, 16, 0.5f);
  const Tensor out = forward(config, weights, input);
  CHECK(out.batch == 1);
  CHECK(out.channels == 1);
  CHECK(out.height == 2);
  CHECK(out.width == 2);
}

TEST_CASE("desk config wires the genes into the back end") {
  SUBCASE("uniform genes") {
    const std::vector<int> genes = {2, 2, 2, 2};
    const ModelConfig config = make_desk_config(genes);
    REQUIRE(config.back_end.size() == 4);
    for (const LayerSpec& layer : config.back_end) {
      CHECK(layer.kind == LayerKind::Conv);
      CHECK(layer.dilation == 2);
    }
    CHECK(count_kind(config.front_end, LayerKind::MaxPool2) == 3);
  }
  SUBCASE("mixed genes get size-preserving padding") {
    const std::vector<int> genes = {2, 3, 4, 5};
    const ModelConfig config = make_desk_config(genes);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(config.back_end[i].dilation == genes[i]);
      CHECK(config.back_end[i].padding == genes[i]);  // r * (K - 1) / 2 with K = 3
    }
    CHECK(backend_dilations(config) == genes);
  }
  SUBCASE("gene count mismatch is rejected") {
    const std::vector<int> genes = {2, 2, 2};
    CHECK_THROWS_WITH_AS(make_desk_config(genes), doctest::Contains("4 genes"),
                         std::invalid_argument);
  }
}

TEST_CASE("distinct chromosomes produce distinct dilation sequences") {
  std::set<std::vector<int>> sequences;
  int total = 0;
  for (int a : {2, 3}) {
    for (int b : {2, 3}) {
      for (int c : {2, 3}) {
        for (int d : {2, 3}) {
          const std::vector<int> genes = {a, b, c, d};
          sequences.insert(backend_dilations(make_desk_config(genes)));
          ++total;
        }
      }
    }
  }
  CHECK(static_cast<int>(sequences.size()) == total);
}

TEST_CASE("forward rejects mismatched weights and indivisible extents") {
  const std::vector<int> genes = {2, 2, 2, 2};
  const ModelConfig config = make_desk_config(genes);
  ModelWeights weights = init_weights(config, 0);

  SUBCASE("weight count") {
    weights.values.pop_back();
    const Tensor input(1, 1, 32, 32, 0.0f);
    CHECK_THROWS_WITH_AS(forward(config, weights, input), doctest::Contains("weight store"),
                         std::invalid_argument);
  }
  SUBCASE("extent not divisible by 8") {
    const Tensor input(1, 1, 20, 32, 0.0f);
    CHECK_THROWS_WITH_AS(forward(config, weights, input), doctest::Contains("divisible by 8"),
                         std::invalid_argument);
  }
  SUBCASE("channel mismatch") {
    const Tensor input(1, 3, 32, 32, 0.0f);
    CHECK_THROWS_WITH_AS(forward(config, weights, input), doctest::Contains("channels"),
                         std::invalid_argument);
  }
}

TEST_CASE("config validation catches malformed stacks") {
  ModelConfig config = make_desk_config(std::vector<int>{2, 2, 2, 2});
  SUBCASE("front end needs exactly three pools") {
    config.front_end.push_back(LayerSpec::pool());
    CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("exactly 3"),
                         std::invalid_argument);
  }
  SUBCASE("back end must be convolutions") {
    config.back_end.push_back(LayerSpec::pool());
    CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("back end"),
                         std::invalid_argument);
  }
  SUBCASE("head must be a 1x1 single-channel conv") {
    config.head = LayerSpec::conv(2, 1, 1, 0);
    CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("head"), std::invalid_argument);
  }
  SUBCASE("even kernels are rejected") {
    config.front_end[0].kernel = 4;
    CHECK_THROWS_WITH_AS(validate(config), doctest::Contains("odd"), std::invalid_argument);
  }
}

TEST_CASE("end-to-end gradients agree with finite differences") {
  const std::vector<int> genes = {2, 3, 2, 2};
  const ModelConfig config = make_desk_config(genes);
  // Wider-than-default init keeps activations and gradients measurable on a
  // finite-difference scale.
  ModelWeights weights = init_weights(config, 11, 0.1);
  Rng rng(13);
  const Tensor input = oracle::random_tensor(rng, 1, 1, 16, 16, 0.0, 1.0);
  const Tensor target = oracle::random_tensor(rng, 1, 1, 2, 2, 0.0, 1.0);

  ForwardCache cache;
  const Tensor pred = forward(config, weights, input, cache);
  const LossResult loss = euclidean_loss(pred, target);
  const std::vector<float> analytic = backward(config, weights, cache, loss.grad);

  auto loss_value = [&]() {
    const Tensor out = forward(config, weights, input);
    return euclidean_loss(out, target).value;
  };

  std::vector<std::size_t> indices;
  for (int i = 0; i < 300; ++i) indices.push_back(rng.index(weights.values.size()));
  // The absolute floor covers the f32 forward's rounding noise, which the
  // 2e-3 central-difference step amplifies to roughly 1e-5 per gradient.
  const auto report = oracle::check_gradients(loss_value, weights.values, analytic, indices,
                                              1e-3, 1e-3, 1e-4);
  // At least 99% of sampled parameters must pass.
  CHECK(report.passed * 100 >= report.tested * 99);
}

}  // TEST_SUITE
