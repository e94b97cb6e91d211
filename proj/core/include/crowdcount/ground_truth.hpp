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

#ifndef CROWDCOUNT_GROUND_TRUTH_HPP
#define CROWDCOUNT_GROUND_TRUTH_HPP

#include <optional>
#include <span>
#include <vector>

namespace crowd {

/// Head position in image pixel coordinates.
struct Point {
  float x = 0.0f;
  float y = 0.0f;
};

/// Head annotations for one image.
struct Annotation {
  std::vector<Point> points;
  int height = 0;
  int width = 0;
};

/// Non-negative 2-D grid whose integral approximates the head count.
/// `scale` is the downsample factor relative to the source image.
struct DensityMap {
  int height = 0;
  int width = 0;
  int scale = 1;
  std::vector<float> values;

  DensityMap() = default;
  DensityMap(int height, int width, int scale = 1)
      : height(height), width(width), scale(scale),
        values(static_cast<std::size_t>(height) * width, 0.0f) {}

  float& at(int y, int x) { return values[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const { return values[static_cast<std::size_t>(y) * width + x]; }

  double sum() const;
};

/// Geometry-adaptive ground-truth settings. Each head is blurred with a
/// Gaussian of bandwidth beta times its mean distance to the k nearest
/// annotated neighbors; the stamp is evaluated at pixel centers within
/// truncation_radius * sigma of the head and renormalized so the in-image
/// part sums to exactly one.
struct GtConfig {
  double beta = 0.3;
  int k = 3;
  int downsample = 8;
  double fallback_sigma = 15.0;    // bandwidth when the image has a single head
  double truncation_radius = 4.0;  // stamp cut-off, in multiples of sigma
};

/// Throws std::invalid_argument if a point lies outside [0, w) x [0, h).
void validate(const Annotation& annotation);

/// Mean Euclidean distance from each point to its min(k, N-1) nearest
/// other points. A point with no neighbors yields nullopt. Throws on an
/// empty point list.
std::vector<std::optional<double>> knn_mean_distance(std::span<const Point> points, int k);

/// Full-resolution density map (scale 1). Every head contributes a
/// truncated, renormalized Gaussian stamp, so the map total matches the
/// head count up to f32 accumulation.
DensityMap generate_density_map(const Annotation& annotation, const GtConfig& config = {});

/// Sum-pools factor x factor blocks, preserving the map total. Dimensions
/// must be divisible by the factor; the result scale is multiplied by it.
DensityMap downsample_density(const DensityMap& map, int factor);

}  // namespace crowd

#endif  // CROWDCOUNT_GROUND_TRUTH_HPP
