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

#ifndef CROWDCOUNT_TENSOR_HPP
#define CROWDCOUNT_TENSOR_HPP

#include <cstdint>
#include <vector>

namespace crowd {

/// Dense rank-4 array in (batch, channels, height, width) order, row-major.
/// This is the only signal carrier in the library; images enter as
/// single-channel tensors and density maps leave as single-channel tensors.
struct Tensor {
  int batch = 0;
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<float> data;

  Tensor() = default;
  Tensor(int batch, int channels, int height, int width, float fill = 0.0f);

  std::int64_t size() const {
    return static_cast<std::int64_t>(batch) * channels * height * width;
  }

  std::int64_t offset(int n, int c, int y, int x) const {
    return ((static_cast<std::int64_t>(n) * channels + c) * height + y) * width + x;
  }

  float& at(int n, int c, int y, int x) { return data[offset(n, c, y, x)]; }
  float at(int n, int c, int y, int x) const { return data[offset(n, c, y, x)]; }

  float* plane(int n, int c) { return data.data() + offset(n, c, 0, 0); }
  const float* plane(int n, int c) const { return data.data() + offset(n, c, 0, 0); }

  bool same_shape(const Tensor& other) const {
    return batch == other.batch && channels == other.channels &&
           height == other.height && width == other.width;
  }
};

/// Parameters of a dilated 2-D convolution. The kernel has shape
/// (out_channels, in_channels, kh, kw); taps are spaced `dilation` pixels
/// apart, the input is zero-padded by `padding` pixels on every side, and
/// the output stride is always 1, so the output grid stays dense. With
/// dilation 1 this is an ordinary convolution.
struct ConvSpec {
  Tensor kernel;
  std::vector<float> bias;  // one per output channel; empty means all zero
  int dilation = 1;
  int padding = 0;
};

struct ConvGrads {
  Tensor input;
  Tensor kernel;
  std::vector<float> bias;
};

struct PoolResult {
  Tensor output;
  std::vector<std::int64_t> argmax;  // flat input index of each window max
  int in_height = 0;
  int in_width = 0;
};

/// Output extent of one spatial axis: padded extent minus the dilated
/// kernel footprint (kernel_extent - 1) * dilation.
int conv_output_extent(int input_extent, int kernel_extent, int dilation, int padding);

/// z(m,n) = sum_{i,j} x(m + r*i, n + r*j) * w(i,j) over the zero-padded
/// input, plus the per-output-channel bias. Accumulation runs in double,
/// the result is stored as f32.
Tensor conv2d_dilated(const Tensor& input, const ConvSpec& spec);

/// Exact gradients of conv2d_dilated with respect to input, kernel and bias.
ConvGrads conv2d_backward(const Tensor& input, const ConvSpec& spec,
                          const Tensor& upstream);

/// 2x2 max pooling with stride 2. Requires even spatial extents. Ties are
/// broken by the first position in row-major window order.
PoolResult maxpool2(const Tensor& input);

/// Routes upstream gradient to the recorded argmax positions.
Tensor maxpool2_backward(const PoolResult& pooled, const Tensor& upstream);

/// Elementwise max(0, x).
Tensor relu(const Tensor& input);

/// Upstream gradient masked by input > 0; the subgradient at 0 is 0.
Tensor relu_backward(const Tensor& input, const Tensor& upstream);

/// Bilinear resample with the align-corners-false convention: sample
/// centers sit at (i + 0.5) * scale - 0.5 and are clamped to the edges.
/// Resizing to the identical extent reproduces the input bit for bit.
Tensor bilinear_resize(const Tensor& input, int out_height, int out_width);

}  // namespace crowd

#endif  // CROWDCOUNT_TENSOR_HPP
