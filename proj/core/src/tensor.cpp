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

#include "crowdcount/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace crowd {

namespace {

void check_dims(int batch, int channels, int height, int width) {
  if (batch < 1 || channels < 1 || height < 1 || width < 1) {
    throw std::invalid_argument("tensor dimensions must all be >= 1, got (" +
                                std::to_string(batch) + ", " + std::to_string(channels) +
                                ", " + std::to_string(height) + ", " +
                                std::to_string(width) + ")");
  }
}

// Shared by forward and backward: validates the spec against the input and
// yields the output extents.
void check_conv(const Tensor& input, const ConvSpec& spec, int& out_h, int& out_w) {
  const Tensor& k = spec.kernel;
  check_dims(k.batch, k.channels, k.height, k.width);
  if (spec.dilation < 1) {
    throw std::invalid_argument("conv2d: dilation must be >= 1, got " +
                                std::to_string(spec.dilation));
  }
  if (spec.padding < 0) {
    throw std::invalid_argument("conv2d: padding must be >= 0, got " +
                                std::to_string(spec.padding));
  }
  if (k.channels != input.channels) {
    throw std::invalid_argument("conv2d: input channels (" + std::to_string(input.channels) +
                                ") do not match kernel input channels (" +
                                std::to_string(k.channels) + ")");
  }
  if (!spec.bias.empty() && static_cast<int>(spec.bias.size()) != k.batch) {
    throw std::invalid_argument("conv2d: bias length (" + std::to_string(spec.bias.size()) +
                                ") does not match output channels (" +
                                std::to_string(k.batch) + ")");
  }
  out_h = conv_output_extent(input.height, k.height, spec.dilation, spec.padding);
  out_w = conv_output_extent(input.width, k.width, spec.dilation, spec.padding);
  if (out_h < 1 || out_w < 1) {
    throw std::invalid_argument(
        "conv2d: dilated kernel footprint (" +
        std::to_string((k.height - 1) * spec.dilation + 1) + "x" +
        std::to_string((k.width - 1) * spec.dilation + 1) +
        ") exceeds the padded input extent (" +
        std::to_string(input.height + 2 * spec.padding) + "x" +
        std::to_string(input.width + 2 * spec.padding) + ")");
  }
}

}  // namespace

Tensor::Tensor(int batch, int channels, int height, int width, float fill)
    : batch(batch), channels(channels), height(height), width(width) {
  check_dims(batch, channels, height, width);
  data.assign(static_cast<std::size_t>(size()), fill);
}

int conv_output_extent(int input_extent, int kernel_extent, int dilation, int padding) {
  return input_extent + 2 * padding - (kernel_extent - 1) * dilation;
}

Tensor conv2d_dilated(const Tensor& input, const ConvSpec& spec) {
  int out_h = 0, out_w = 0;
  check_conv(input, spec, out_h, out_w);
  const Tensor& k = spec.kernel;
  const int out_c = k.batch;
  const int r = spec.dilation;
  const int p = spec.padding;

  Tensor output(input.batch, out_c, out_h, out_w);

  // Each (n, oc) plane is accumulated independently in a fixed order.
  const int planes = input.batch * out_c;
  for (int plane_idx = 0; plane_idx < planes; ++plane_idx) {
    const int n = plane_idx / out_c;
    const int oc = plane_idx % out_c;
    const double bias = spec.bias.empty() ? 0.0 : spec.bias[oc];
    std::vector<double> acc(static_cast<std::size_t>(out_h) * out_w, bias);
    for (int ic = 0; ic < input.channels; ++ic) {
      const float* in_plane = input.plane(n, ic);
      for (int ky = 0; ky < k.height; ++ky) {
        for (int kx = 0; kx < k.width; ++kx) {
          const double w = k.at(oc, ic, ky, kx);
          if (w == 0.0) continue;
          const int x_shift = kx * r - p;
          const int ox_lo = std::max(0, -x_shift);
          const int ox_hi = std::min(out_w, input.width - x_shift);
          for (int oy = 0; oy < out_h; ++oy) {
            const int iy = oy + ky * r - p;
            if (iy < 0 || iy >= input.height) continue;
            const float* in_row = in_plane + static_cast<std::size_t>(iy) * input.width;
            double* acc_row = acc.data() + static_cast<std::size_t>(oy) * out_w;
            for (int ox = ox_lo; ox < ox_hi; ++ox) {
              acc_row[ox] += w * in_row[ox + x_shift];
            }
          }
        }
      }
    }
    float* out_plane = output.plane(n, oc);
    for (std::size_t i = 0; i < acc.size(); ++i) {
      out_plane[i] = static_cast<float>(acc[i]);
    }
  }
  return output;
}

ConvGrads conv2d_backward(const Tensor& input, const ConvSpec& spec, const Tensor& upstream) {
  int out_h = 0, out_w = 0;
  check_conv(input, spec, out_h, out_w);
  const Tensor& k = spec.kernel;
  const int out_c = k.batch;
  if (upstream.batch != input.batch || upstream.channels != out_c ||
      upstream.height != out_h || upstream.width != out_w) {
    throw std::invalid_argument(
        "conv2d_backward: upstream shape (" + std::to_string(upstream.batch) + ", " +
        std::to_string(upstream.channels) + ", " + std::to_string(upstream.height) + ", " +
        std::to_string(upstream.width) + ") does not match forward output (" +
        std::to_string(input.batch) + ", " + std::to_string(out_c) + ", " +
        std::to_string(out_h) + ", " + std::to_string(out_w) + ")");
  }
  const int r = spec.dilation;
  const int p = spec.padding;

  ConvGrads grads;
  grads.input = Tensor(input.batch, input.channels, input.height, input.width);
  grads.kernel = Tensor(k.batch, k.channels, k.height, k.width);
  grads.bias.assign(static_cast<std::size_t>(out_c), 0.0f);

  std::vector<double> gin(static_cast<std::size_t>(grads.input.size()), 0.0);
  std::vector<double> gk(static_cast<std::size_t>(k.size()), 0.0);

  for (int oc = 0; oc < out_c; ++oc) {
    double bias_acc = 0.0;
    for (int n = 0; n < input.batch; ++n) {
      const float* up_plane = upstream.plane(n, oc);
      const std::int64_t up_count = static_cast<std::int64_t>(out_h) * out_w;
      for (std::int64_t i = 0; i < up_count; ++i) bias_acc += up_plane[i];

      for (int ic = 0; ic < input.channels; ++ic) {
        const float* in_plane = input.plane(n, ic);
        double* gin_plane = gin.data() + grads.input.offset(n, ic, 0, 0);
        for (int ky = 0; ky < k.height; ++ky) {
          for (int kx = 0; kx < k.width; ++kx) {
            const double w = k.at(oc, ic, ky, kx);
            const int x_shift = kx * r - p;
            const int ox_lo = std::max(0, -x_shift);
            const int ox_hi = std::min(out_w, input.width - x_shift);
            double kernel_acc = 0.0;
            for (int oy = 0; oy < out_h; ++oy) {
              const int iy = oy + ky * r - p;
              if (iy < 0 || iy >= input.height) continue;
              const float* in_row = in_plane + static_cast<std::size_t>(iy) * input.width;
              double* gin_row = gin_plane + static_cast<std::size_t>(iy) * input.width;
              const float* up_row = up_plane + static_cast<std::size_t>(oy) * out_w;
              for (int ox = ox_lo; ox < ox_hi; ++ox) {
                const double u = up_row[ox];
                kernel_acc += u * in_row[ox + x_shift];
                gin_row[ox + x_shift] += w * u;
              }
            }
            gk[static_cast<std::size_t>(k.offset(oc, ic, ky, kx))] += kernel_acc;
          }
        }
      }
    }
    grads.bias[oc] = static_cast<float>(bias_acc);
  }

  for (std::size_t i = 0; i < gin.size(); ++i) {
    grads.input.data[i] = static_cast<float>(gin[i]);
  }
  for (std::size_t i = 0; i < gk.size(); ++i) {
    grads.kernel.data[i] = static_cast<float>(gk[i]);
  }
  return grads;
}

PoolResult maxpool2(const Tensor& input) {
  if (input.height % 2 != 0 || input.width % 2 != 0) {
    throw std::invalid_argument("maxpool2: spatial extents must be even, got " +
                                std::to_string(input.height) + "x" +
                                std::to_string(input.width));
  }
  PoolResult result;
  result.in_height = input.height;
  result.in_width = input.width;
  result.output = Tensor(input.batch, input.channels, input.height / 2, input.width / 2);
  result.argmax.resize(static_cast<std::size_t>(result.output.size()));

  std::size_t out_i = 0;
  for (int n = 0; n < input.batch; ++n) {
    for (int c = 0; c < input.channels; ++c) {
      for (int oy = 0; oy < result.output.height; ++oy) {
        for (int ox = 0; ox < result.output.width; ++ox) {
          // First-occurrence-wins scan over the 2x2 window, row-major.
          std::int64_t best_idx = input.offset(n, c, 2 * oy, 2 * ox);
          float best = input.data[best_idx];
          for (int dy = 0; dy < 2; ++dy) {
            for (int dx = 0; dx < 2; ++dx) {
              const std::int64_t idx = input.offset(n, c, 2 * oy + dy, 2 * ox + dx);
              if (input.data[idx] > best) {
                best = input.data[idx];
                best_idx = idx;
              }
            }
          }
          result.output.data[out_i] = best;
          result.argmax[out_i] = best_idx;
          ++out_i;
        }
      }
    }
  }
  return result;
}

Tensor maxpool2_backward(const PoolResult& pooled, const Tensor& upstream) {
  if (!upstream.same_shape(pooled.output)) {
    throw std::invalid_argument("maxpool2_backward: upstream shape does not match pool output");
  }
  Tensor grad(upstream.batch, upstream.channels, pooled.in_height, pooled.in_width);
  for (std::size_t i = 0; i < pooled.argmax.size(); ++i) {
    grad.data[pooled.argmax[i]] += upstream.data[i];
  }
  return grad;
}

Tensor relu(const Tensor& input) {
  Tensor output = input;
  for (float& v : output.data) v = v > 0.0f ? v : 0.0f;
  return output;
}

Tensor relu_backward(const Tensor& input, const Tensor& upstream) {
  if (!upstream.same_shape(input)) {
    throw std::invalid_argument("relu_backward: upstream shape does not match input");
  }
  Tensor grad = upstream;
  for (std::size_t i = 0; i < grad.data.size(); ++i) {
    if (input.data[i] <= 0.0f) grad.data[i] = 0.0f;
  }
  return grad;
}

Tensor bilinear_resize(const Tensor& input, int out_height, int out_width) {
  if (out_height < 1 || out_width < 1) {
    throw std::invalid_argument("bilinear_resize: output extents must be >= 1, got " +
                                std::to_string(out_height) + "x" + std::to_string(out_width));
  }
  Tensor output(input.batch, input.channels, out_height, out_width);
  const double scale_y = static_cast<double>(input.height) / out_height;
  const double scale_x = static_cast<double>(input.width) / out_width;

  for (int n = 0; n < input.batch; ++n) {
    for (int c = 0; c < input.channels; ++c) {
      const float* in_plane = input.plane(n, c);
      float* out_plane = output.plane(n, c);
      for (int oy = 0; oy < out_height; ++oy) {
        const double src_y = std::max(0.0, (oy + 0.5) * scale_y - 0.5);
        const int y0 = std::min(static_cast<int>(src_y), input.height - 1);
        const int y1 = std::min(y0 + 1, input.height - 1);
        const double wy = src_y - y0;
        for (int ox = 0; ox < out_width; ++ox) {
          const double src_x = std::max(0.0, (ox + 0.5) * scale_x - 0.5);
          const int x0 = std::min(static_cast<int>(src_x), input.width - 1);
          const int x1 = std::min(x0 + 1, input.width - 1);
          const double wx = src_x - x0;
          const double top = (1.0 - wx) * in_plane[static_cast<std::size_t>(y0) * input.width + x0] +
                             wx * in_plane[static_cast<std::size_t>(y0) * input.width + x1];
          const double bottom = (1.0 - wx) * in_plane[static_cast<std::size_t>(y1) * input.width + x0] +
                                wx * in_plane[static_cast<std::size_t>(y1) * input.width + x1];
          out_plane[static_cast<std::size_t>(oy) * out_width + ox] =
              static_cast<float>((1.0 - wy) * top + wy * bottom);
        }
      }
    }
  }
  return output;
}

}  // namespace crowd
