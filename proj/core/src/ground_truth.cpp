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

#include "crowdcount/ground_truth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace crowd {

double DensityMap::sum() const {
  double total = 0.0;
  for (float v : values) total += v;
  return total;
}

void validate(const Annotation& annotation) {
  for (std::size_t i = 0; i < annotation.points.size(); ++i) {
    const Point& pt = annotation.points[i];
    if (!(pt.x >= 0.0f && pt.x < static_cast<float>(annotation.width)) ||
        !(pt.y >= 0.0f && pt.y < static_cast<float>(annotation.height))) {
      throw std::invalid_argument("annotation point " + std::to_string(i) + " at (" +
                                  std::to_string(pt.x) + ", " + std::to_string(pt.y) +
                                  ") lies outside the " + std::to_string(annotation.width) +
                                  "x" + std::to_string(annotation.height) + " image");
    }
  }
}

std::vector<std::optional<double>> knn_mean_distance(std::span<const Point> points, int k) {
  if (points.empty()) {
    throw std::invalid_argument("knn_mean_distance: empty point list");
  }
  if (k < 1) {
    throw std::invalid_argument("knn_mean_distance: k must be >= 1, got " + std::to_string(k));
  }
  const std::size_t n = points.size();
  std::vector<std::optional<double>> result(n);
  std::vector<double> dists;
  dists.reserve(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    dists.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double dx = static_cast<double>(points[i].x) - points[j].x;
      const double dy = static_cast<double>(points[i].y) - points[j].y;
      dists.push_back(std::sqrt(dx * dx + dy * dy));
    }
    if (dists.empty()) continue;  // single point: no neighbors
    const std::size_t use = std::min<std::size_t>(static_cast<std::size_t>(k), dists.size());
    std::partial_sort(dists.begin(), dists.begin() + use, dists.end());
    double mean = 0.0;
    for (std::size_t j = 0; j < use; ++j) mean += dists[j];
    result[i] = mean / static_cast<double>(use);
  }
  return result;
}

DensityMap generate_density_map(const Annotation& annotation, const GtConfig& config) {
  validate(annotation);
  if (annotation.height < 1 || annotation.width < 1) {
    throw std::invalid_argument("generate_density_map: image extents must be >= 1");
  }
  if (!(config.beta > 0.0)) {
    throw std::invalid_argument("generate_density_map: beta must be > 0");
  }
  if (config.k < 1) {
    throw std::invalid_argument("generate_density_map: k must be >= 1");
  }
  DensityMap map(annotation.height, annotation.width, 1);
  if (annotation.points.empty()) return map;

  const auto mean_dist = knn_mean_distance(annotation.points, config.k);
  std::vector<double> grid(map.values.size(), 0.0);

  for (std::size_t n = 0; n < annotation.points.size(); ++n) {
    const double cx = annotation.points[n].x;
    const double cy = annotation.points[n].y;
    const double sigma =
        mean_dist[n] ? config.beta * (*mean_dist[n]) : config.fallback_sigma;
    const double radius = config.truncation_radius * sigma;

    // Degenerate bandwidth (coincident points): the whole unit mass lands
    // on the nearest pixel.
    if (!(sigma > 1e-9)) {
      const int py = std::clamp(static_cast<int>(std::lround(cy)), 0, map.height - 1);
      const int px = std::clamp(static_cast<int>(std::lround(cx)), 0, map.width - 1);
      grid[static_cast<std::size_t>(py) * map.width + px] += 1.0;
      continue;
    }

    const int y_lo = std::max(0, static_cast<int>(std::floor(cy - radius)));
    const int y_hi = std::min(map.height - 1, static_cast<int>(std::ceil(cy + radius)));
    const int x_lo = std::max(0, static_cast<int>(std::floor(cx - radius)));
    const int x_hi = std::min(map.width - 1, static_cast<int>(std::ceil(cx + radius)));

    const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    const double radius_sq = radius * radius;
    double stamp_sum = 0.0;
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double d_sq = (y - cy) * (y - cy) + (x - cx) * (x - cx);
        if (d_sq > radius_sq) continue;
        stamp_sum += std::exp(-d_sq * inv_two_sigma_sq);
      }
    }
    if (stamp_sum <= 0.0) {
      const int py = std::clamp(static_cast<int>(std::lround(cy)), 0, map.height - 1);
      const int px = std::clamp(static_cast<int>(std::lround(cx)), 0, map.width - 1);
      grid[static_cast<std::size_t>(py) * map.width + px] += 1.0;
      continue;
    }
    const double norm = 1.0 / stamp_sum;
    for (int y = y_lo; y <= y_hi; ++y) {
      for (int x = x_lo; x <= x_hi; ++x) {
        const double d_sq = (y - cy) * (y - cy) + (x - cx) * (x - cx);
        if (d_sq > radius_sq) continue;
        grid[static_cast<std::size_t>(y) * map.width + x] +=
            std::exp(-d_sq * inv_two_sigma_sq) * norm;
      }
    }
  }

  for (std::size_t i = 0; i < grid.size(); ++i) {
    map.values[i] = static_cast<float>(grid[i]);
  }
  return map;
}

DensityMap downsample_density(const DensityMap& map, int factor) {
  if (factor < 1) {
    throw std::invalid_argument("downsample_density: factor must be >= 1, got " +
                                std::to_string(factor));
  }
  if (map.height % factor != 0 || map.width % factor != 0) {
    throw std::invalid_argument("downsample_density: extents " + std::to_string(map.height) +
                                "x" + std::to_string(map.width) +
                                " are not divisible by factor " + std::to_string(factor));
  }
  if (factor == 1) return map;

  DensityMap out(map.height / factor, map.width / factor, map.scale * factor);
  for (int oy = 0; oy < out.height; ++oy) {
    for (int ox = 0; ox < out.width; ++ox) {
      double block = 0.0;
      for (int dy = 0; dy < factor; ++dy) {
        for (int dx = 0; dx < factor; ++dx) {
          block += map.at(oy * factor + dy, ox * factor + dx);
        }
      }
      out.at(oy, ox) = static_cast<float>(block);
    }
  }
  return out;
}

}  // namespace crowd
