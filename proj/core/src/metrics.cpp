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

#include "crowdcount/metrics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace crowd {

double count_from_map(std::span<const float> values) {
  double total = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const float v = values[i];
    if (!std::isfinite(v)) {
      throw std::invalid_argument("count_from_map: non-finite value at index " +
                                  std::to_string(i));
    }
    if (v > 0.0f) total += v;
  }
  return total;
}

double count_from_map(const DensityMap& map) {
  return count_from_map(std::span<const float>(map.values));
}

EvalReport evaluate(std::span<const double> predicted, std::span<const double> ground_truth) {
  if (predicted.empty()) {
    throw std::invalid_argument("evaluate: empty count lists");
  }
  if (predicted.size() != ground_truth.size()) {
    throw std::invalid_argument("evaluate: " + std::to_string(predicted.size()) +
                                " predictions vs " + std::to_string(ground_truth.size()) +
                                " ground-truth counts");
  }
  EvalReport report;
  report.images = static_cast<int>(predicted.size());
  report.per_image.reserve(predicted.size());
  double abs_sum = 0.0;
  double sq_sum = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    report.per_image.emplace_back(predicted[i], ground_truth[i]);
    const double err = std::abs(predicted[i] - ground_truth[i]);
    abs_sum += err;
    sq_sum += err * err;
  }
  report.mae = abs_sum / report.images;
  report.mse = std::sqrt(sq_sum / report.images);
  return report;
}

}  // namespace crowd
