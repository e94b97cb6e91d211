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

#include "crowdcount/network.hpp"

#include <stdexcept>
#include <string>
#include <utility>

#include "crowdcount/rng.hpp"

namespace crowd {

namespace {

// Flattened execution step. Back-end convolutions carry an implicit ReLU,
// materialized here as an explicit step; the head never does.
struct ExecStep {
  LayerSpec spec;
  int in_channels = 0;       // conv only
  std::size_t weight_offset = 0;  // conv only: kernel values, then biases
};

struct ExecPlan {
  std::vector<ExecStep> steps;
  std::size_t parameter_count = 0;
};

void check_conv_spec(const LayerSpec& layer, const char* where) {
  if (layer.out_channels < 1) {
    throw std::invalid_argument(std::string(where) + ": conv out_channels must be >= 1");
  }
  if (layer.kernel < 1 || layer.kernel % 2 == 0) {
    throw std::invalid_argument(std::string(where) + ": conv kernel must be odd and >= 1, got " +
                                std::to_string(layer.kernel));
  }
  if (layer.dilation < 1) {
    throw std::invalid_argument(std::string(where) + ": dilation must be >= 1, got " +
                                std::to_string(layer.dilation));
  }
  if (layer.padding < 0) {
    throw std::invalid_argument(std::string(where) + ": padding must be >= 0");
  }
}

ExecPlan build_plan(const ModelConfig& config) {
  validate(config);
  ExecPlan plan;
  int channels = config.in_channels;
  auto push_conv = [&](const LayerSpec& layer) {
    ExecStep step;
    step.spec = layer;
    step.in_channels = channels;
    step.weight_offset = plan.parameter_count;
    plan.parameter_count += static_cast<std::size_t>(layer.out_channels) * channels *
                                layer.kernel * layer.kernel +
                            static_cast<std::size_t>(layer.out_channels);
    plan.steps.push_back(step);
    channels = layer.out_channels;
  };

  for (const LayerSpec& layer : config.front_end) {
    if (layer.kind == LayerKind::Conv) {
      push_conv(layer);
    } else {
      plan.steps.push_back({layer, channels, 0});
    }
  }
  for (const LayerSpec& layer : config.back_end) {
    push_conv(layer);
    plan.steps.push_back({LayerSpec::relu(), channels, 0});
  }
  push_conv(config.head);
  return plan;
}

ConvSpec conv_spec_for(const ExecStep& step, const ModelWeights& weights) {
  const LayerSpec& layer = step.spec;
  ConvSpec spec;
  spec.kernel = Tensor(layer.out_channels, step.in_channels, layer.kernel, layer.kernel);
  spec.dilation = layer.dilation;
  spec.padding = layer.padding;
  const std::size_t kernel_size = static_cast<std::size_t>(spec.kernel.size());
  const float* base = weights.values.data() + step.weight_offset;
  spec.kernel.data.assign(base, base + kernel_size);
  spec.bias.assign(base + kernel_size, base + kernel_size + layer.out_channels);
  return spec;
}

}  // namespace

void validate(const ModelConfig& config) {
  if (config.in_channels < 1) {
    throw std::invalid_argument("model config: in_channels must be >= 1");
  }
  int pools = 0;
  for (const LayerSpec& layer : config.front_end) {
    if (layer.kind == LayerKind::Conv) {
      check_conv_spec(layer, "front end");
    } else if (layer.kind == LayerKind::MaxPool2) {
      ++pools;
    }
  }
  if (pools != 3) {
    throw std::invalid_argument("model config: front end must contain exactly 3 maxpool2 layers, got " +
                                std::to_string(pools));
  }
  for (const LayerSpec& layer : config.back_end) {
    if (layer.kind != LayerKind::Conv) {
      throw std::invalid_argument("model config: back end entries must all be convolutions");
    }
    check_conv_spec(layer, "back end");
  }
  if (config.head.kind != LayerKind::Conv || config.head.kernel != 1 ||
      config.head.out_channels != 1) {
    throw std::invalid_argument("model config: head must be a 1x1 conv to one channel");
  }
}

std::size_t parameter_count(const ModelConfig& config) {
  return build_plan(config).parameter_count;
}

ModelWeights init_weights(const ModelConfig& config, std::uint64_t seed, double stddev) {
  const ExecPlan plan = build_plan(config);
  ModelWeights weights;
  weights.values.assign(plan.parameter_count, 0.0f);
  Rng rng(seed);
  for (const ExecStep& step : plan.steps) {
    if (step.spec.kind != LayerKind::Conv) continue;
    const std::size_t kernel_count = static_cast<std::size_t>(step.spec.out_channels) *
                                     step.in_channels * step.spec.kernel * step.spec.kernel;
    for (std::size_t i = 0; i < kernel_count; ++i) {
      weights.values[step.weight_offset + i] = static_cast<float>(stddev * rng.gaussian());
    }
    // Biases stay zero.
  }
  return weights;
}

namespace {

void check_forward_args(const ExecPlan& plan, const ModelConfig& config,
                        const ModelWeights& weights, const Tensor& input) {
  if (weights.values.size() != plan.parameter_count) {
    throw std::invalid_argument("forward: weight store holds " +
                                std::to_string(weights.values.size()) +
                                " values but the config needs " +
                                std::to_string(plan.parameter_count));
  }
  if (input.channels != config.in_channels) {
    throw std::invalid_argument("forward: input has " + std::to_string(input.channels) +
                                " channels, config expects " +
                                std::to_string(config.in_channels));
  }
  if (input.height % 8 != 0 || input.width % 8 != 0) {
    throw std::invalid_argument("forward: input extents must be divisible by 8, got " +
                                std::to_string(input.height) + "x" +
                                std::to_string(input.width));
  }
}

Tensor run_forward(const ExecPlan& plan, const ModelWeights& weights, const Tensor& input,
                   ForwardCache* cache) {
  Tensor current = input;
  for (const ExecStep& step : plan.steps) {
    if (cache != nullptr) cache->inputs.push_back(current);
    switch (step.spec.kind) {
      case LayerKind::Conv: {
        const ConvSpec spec = conv_spec_for(step, weights);
        current = conv2d_dilated(current, spec);
        break;
      }
      case LayerKind::MaxPool2: {
        PoolResult pooled = maxpool2(current);
        current = pooled.output;
        if (cache != nullptr) cache->pools.push_back(std::move(pooled));
        break;
      }
      case LayerKind::Relu:
        current = relu(current);
        break;
    }
  }
  if (cache != nullptr) cache->output = current;
  return current;
}

}  // namespace

Tensor forward(const ModelConfig& config, const ModelWeights& weights, const Tensor& input) {
  const ExecPlan plan = build_plan(config);
  check_forward_args(plan, config, weights, input);
  return run_forward(plan, weights, input, nullptr);
}

Tensor forward(const ModelConfig& config, const ModelWeights& weights, const Tensor& input,
               ForwardCache& cache) {
  const ExecPlan plan = build_plan(config);
  check_forward_args(plan, config, weights, input);
  cache.inputs.clear();
  cache.pools.clear();
  return run_forward(plan, weights, input, &cache);
}

std::vector<float> backward(const ModelConfig& config, const ModelWeights& weights,
                            const ForwardCache& cache, const Tensor& upstream) {
  const ExecPlan plan = build_plan(config);
  if (cache.inputs.size() != plan.steps.size()) {
    throw std::invalid_argument("backward: cache does not match the config (got " +
                                std::to_string(cache.inputs.size()) + " steps, expected " +
                                std::to_string(plan.steps.size()) + ")");
  }
  if (!upstream.same_shape(cache.output)) {
    throw std::invalid_argument("backward: upstream shape does not match the cached output");
  }

  std::vector<float> grads(plan.parameter_count, 0.0f);
  Tensor grad = upstream;
  std::size_t pool_index = cache.pools.size();

  for (std::size_t i = plan.steps.size(); i-- > 0;) {
    const ExecStep& step = plan.steps[i];
    const Tensor& step_input = cache.inputs[i];
    switch (step.spec.kind) {
      case LayerKind::Conv: {
        const ConvSpec spec = conv_spec_for(step, weights);
        ConvGrads conv_grads = conv2d_backward(step_input, spec, grad);
        const std::size_t kernel_count = static_cast<std::size_t>(spec.kernel.size());
        float* dst = grads.data() + step.weight_offset;
        for (std::size_t j = 0; j < kernel_count; ++j) dst[j] = conv_grads.kernel.data[j];
        for (std::size_t j = 0; j < conv_grads.bias.size(); ++j) {
          dst[kernel_count + j] = conv_grads.bias[j];
        }
        grad = std::move(conv_grads.input);
        break;
      }
      case LayerKind::MaxPool2:
        grad = maxpool2_backward(cache.pools[--pool_index], grad);
        break;
      case LayerKind::Relu:
        grad = relu_backward(step_input, grad);
        break;
    }
  }
  return grads;
}

ModelConfig make_desk_config(std::span<const int> genes) {
  if (genes.size() != 4) {
    throw std::invalid_argument("make_desk_config: expected 4 genes, got " +
                                std::to_string(genes.size()));
  }
  ModelConfig config;
  config.in_channels = 1;
  auto conv3 = [](int out) { return LayerSpec::conv(out, 3, 1, 1); };
  config.front_end = {
      conv3(16), LayerSpec::relu(), conv3(16), LayerSpec::relu(), LayerSpec::pool(),
      conv3(32), LayerSpec::relu(), conv3(32), LayerSpec::relu(), LayerSpec::pool(),
      conv3(64), LayerSpec::relu(), conv3(64), LayerSpec::relu(), LayerSpec::pool(),
  };
  const int back_channels[] = {64, 64, 32, 16};
  for (std::size_t i = 0; i < 4; ++i) {
    const int rate = genes[i];
    if (rate < 1) {
      throw std::invalid_argument("make_desk_config: dilation genes must be >= 1, got " +
                                  std::to_string(rate));
    }
    // Size-preserving padding for a 3x3 kernel.
    config.back_end.push_back(LayerSpec::conv(back_channels[i], 3, rate, rate));
  }
  config.head = LayerSpec::conv(1, 1, 1, 0);
  return config;
}

ModelConfig make_paper_scale_config() {
  const int genes[] = {2, 2, 2, 2, 2, 2, 2, 2};
  return make_paper_scale_config(genes);
}

ModelConfig make_paper_scale_config(std::span<const int> genes, int in_channels) {
  if (genes.size() != 8) {
    throw std::invalid_argument("make_paper_scale_config: expected 8 genes, got " +
                                std::to_string(genes.size()));
  }
  ModelConfig config;
  config.in_channels = in_channels;
  auto conv3 = [](int out) { return LayerSpec::conv(out, 3, 1, 1); };
  auto relu = [] { return LayerSpec::relu(); };
  config.front_end = {
      conv3(64),  relu(), conv3(64),  relu(), LayerSpec::pool(),
      conv3(128), relu(), conv3(128), relu(), LayerSpec::pool(),
      conv3(256), relu(), conv3(256), relu(), conv3(256), relu(), conv3(256), relu(),
      LayerSpec::pool(),
      conv3(512), relu(), conv3(512), relu(), conv3(512), relu(), conv3(512), relu(),
  };
  const int back_channels[] = {1024, 1024, 512, 512, 512, 256, 128, 64};
  for (std::size_t i = 0; i < 8; ++i) {
    const int rate = genes[i];
    if (rate < 1) {
      throw std::invalid_argument("make_paper_scale_config: dilation genes must be >= 1, got " +
                                  std::to_string(rate));
    }
    config.back_end.push_back(LayerSpec::conv(back_channels[i], 3, rate, rate));
  }
  config.head = LayerSpec::conv(1, 1, 1, 0);
  return config;
}

std::vector<int> backend_dilations(const ModelConfig& config) {
  std::vector<int> rates;
  rates.reserve(config.back_end.size());
  for (const LayerSpec& layer : config.back_end) rates.push_back(layer.dilation);
  return rates;
}

}  // namespace crowd
