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

#ifndef CROWDCOUNT_METRICS_HPP
#define CROWDCOUNT_METRICS_HPP

#include <span>
#include <utility>
#include <vector>

#include "crowdcount/ground_truth.hpp"

namespace crowd {

struct EvalReport {
  std::vector<std::pair<double, double>> per_image;  // (predicted, ground truth)
  double mae = 0.0;
  double mse = 0.0;  // root-mean-square count error
  int images = 0;
};

/// Count read-out: sum of all cells with negative values clamped to zero.
/// Throws on non-finite values.
double count_from_map(std::span<const float> values);
double count_from_map(const DensityMap& map);

/// MAE and root-mean-square error over per-image counts.
EvalReport evaluate(std::span<const double> predicted, std::span<const double> ground_truth);

}  // namespace crowd

#endif  // CROWDCOUNT_METRICS_HPP
