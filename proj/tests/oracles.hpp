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
//
// Independent reference implementations used only by the test suite. These
// deliberately share no code with the production kernels: everything here is
// a direct, naive evaluation of the defining formulas.

#ifndef CROWDCOUNT_TESTS_ORACLES_HPP
#define CROWDCOUNT_TESTS_ORACLES_HPP

#include <functional>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "crowdcount/ground_truth.hpp"
#include "crowdcount/rng.hpp"
#include "crowdcount/tensor.hpp"

namespace oracle {

/// Four-nested-loop dilated convolution, evaluated entirely in f64.
/// Returns the flat (batch, out_c, out_h, out_w) result.
std::vector<double> conv2d_reference(const crowd::Tensor& input, const crowd::Tensor& kernel,
                                     std::span<const float> bias, int dilation, int padding,
                                     int& out_h, int& out_w);

/// Ordinary (dilation-1) convolution written without a dilation variable.
/// Terms accumulate per output element in the same (ic, ky, kx) order as the
/// production kernel so r = 1 results can be compared bit for bit.
crowd::Tensor plain_conv2d(const crowd::Tensor& input, const crowd::Tensor& kernel,
                           std::span<const float> bias, int padding);

/// Central-difference gradient check against an arbitrary scalar function of
/// a parameter buffer. Perturbs each sampled index by +/- eps (step widened
/// to representable f32 values), restores it, and compares with the analytic
/// gradient under a relative tolerance with an absolute floor.
struct GradCheck {
  int tested = 0;
  int passed = 0;
  double worst = 0.0;  // largest relative mismatch seen
};
GradCheck check_gradients(const std::function<double()>& loss, std::span<float> params,
                          std::span<const float> analytic,
                          std::span<const std::size_t> indices, double eps, double rtol,
                          double atol);

/// All-pairs kNN mean distances: computes every pairwise distance, sorts,
/// averages the first min(k, N-1).
std::vector<std::optional<double>> knn_reference(std::span<const crowd::Point> points, int k);

/// Direct whole-image evaluation of the truncated, renormalized Gaussian
/// superposition that defines the ground-truth map.
crowd::DensityMap density_reference(const crowd::Annotation& annotation,
                                    const crowd::GtConfig& config);

/// Straight block sum.
crowd::DensityMap block_sum_reference(const crowd::DensityMap& map, int factor);

/// Per-window max scan.
crowd::Tensor maxpool_reference(const crowd::Tensor& input);

/// Bilinear sample of one output position, align-corners-false, in f64.
double bilinear_reference(const crowd::Tensor& input, int n, int c, int oy, int ox,
                          int out_h, int out_w);

/// Two-pass MAE / root-mean-square error.
std::pair<double, double> mae_mse_reference(std::span<const double> predicted,
                                            std::span<const double> ground_truth);

/// Uniform tensor filled from the shared deterministic generator.
crowd::Tensor random_tensor(crowd::Rng& rng, int n, int c, int h, int w, double lo = -1.0,
                            double hi = 1.0);

}  // namespace oracle

#endif  // CROWDCOUNT_TESTS_ORACLES_HPP
