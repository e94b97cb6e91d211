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

#ifndef CROWDCOUNT_NETWORK_HPP
#define CROWDCOUNT_NETWORK_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "crowdcount/tensor.hpp"

namespace crowd {

enum class LayerKind { Conv, MaxPool2, Relu };

struct LayerSpec {
  LayerKind kind = LayerKind::Conv;
  int out_channels = 0;  // conv only
  int kernel = 0;        // conv only; odd
  int dilation = 1;
  int padding = 0;

  static LayerSpec conv(int out_channels, int kernel, int dilation, int padding) {
    return {LayerKind::Conv, out_channels, kernel, dilation, padding};
  }
  static LayerSpec pool() { return {LayerKind::MaxPool2, 0, 0, 1, 0}; }
  static LayerSpec relu() { return {LayerKind::Relu, 0, 0, 1, 0}; }
};

/// Two-stage density regressor. The front end is a conv/pool feature
/// extractor with exactly three 2x2 pools, so its output sits at 1/8 of the
/// input resolution. The back end is a list of convolutions whose dilation
/// rates are the searchable genes; a ReLU follows each of them implicitly.
/// The head is a 1x1 convolution to one channel with no activation, so
/// negative map values are possible and are only clamped at metric time.
struct ModelConfig {
  int in_channels = 1;
  std::vector<LayerSpec> front_end;  // conv / relu / maxpool2 entries
  std::vector<LayerSpec> back_end;   // conv entries only
  LayerSpec head = LayerSpec::conv(1, 1, 1, 0);
};

/// Flat f32 parameter store. Per-layer slices follow the execution order
/// front end, back end, head; each conv slice is kernel values then biases.
struct ModelWeights {
  std::vector<float> values;
};

/// Throws std::invalid_argument on malformed configs: even conv kernels,
/// dilation < 1, a front end without exactly three pools, non-conv back-end
/// entries, or a head that is not a 1x1 conv to one channel.
void validate(const ModelConfig& config);

std::size_t parameter_count(const ModelConfig& config);

/// Conv weights i.i.d. from N(0, stddev^2) using the seeded generator;
/// biases zero.
ModelWeights init_weights(const ModelConfig& config, std::uint64_t seed,
                          double stddev = 0.01);

/// Per-layer tensors recorded by the caching forward pass, consumed by
/// backward. `inputs[i]` is what execution step i consumed.
struct ForwardCache {
  std::vector<Tensor> inputs;
  std::vector<PoolResult> pools;  // parallel to pool steps, in order
  Tensor output;
};

/// Runs the network on a batch. Input spatial extents must be divisible
/// by 8; the output has shape (batch, 1, H/8, W/8).
Tensor forward(const ModelConfig& config, const ModelWeights& weights, const Tensor& input);
Tensor forward(const ModelConfig& config, const ModelWeights& weights, const Tensor& input,
               ForwardCache& cache);

/// Gradient of a scalar loss with respect to every weight, given the
/// upstream gradient at the network output. Layout matches ModelWeights.
std::vector<float> backward(const ModelConfig& config, const ModelWeights& weights,
                            const ForwardCache& cache, const Tensor& upstream);

/// Desk-scale model: front end 16,16,P,32,32,P,64,64,P; back end
/// 64,64,32,16 with the four supplied dilation rates; 1x1 head.
ModelConfig make_desk_config(std::span<const int> genes);

/// Full-scale shape: the first twelve 3x3 convs of a VGG-19-style extractor
/// (64,64,128,128,256x4,512x4, pools after convs 2, 4 and 8) and a back end
/// of 1024,1024,512,512,512,256,128,64 with the eight supplied dilation
/// rates (all 2 by default).
ModelConfig make_paper_scale_config();
ModelConfig make_paper_scale_config(std::span<const int> genes, int in_channels = 1);

/// Dilation rates of the back-end convolutions, gene order.
std::vector<int> backend_dilations(const ModelConfig& config);

}  // namespace crowd

#endif  // CROWDCOUNT_NETWORK_HPP
