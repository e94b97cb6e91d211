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

#include "crowdcount/augmentation.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "crowdcount/rng.hpp"

namespace crowd {

namespace {

Patch crop(const Image& image, const Annotation& annotation, int y0, int x0, int ph, int pw,
           const std::string& source_id) {
  Patch patch;
  patch.image = Image(ph, pw);
  for (int y = 0; y < ph; ++y) {
    for (int x = 0; x < pw; ++x) {
      patch.image.at(y, x) = image.at(y0 + y, x0 + x);
    }
  }
  patch.annotation.height = ph;
  patch.annotation.width = pw;
  for (const Point& pt : annotation.points) {
    // Half-open membership: [x0, x0 + pw) x [y0, y0 + ph).
    if (pt.x >= static_cast<float>(x0) && pt.x < static_cast<float>(x0 + pw) &&
        pt.y >= static_cast<float>(y0) && pt.y < static_cast<float>(y0 + ph)) {
      patch.annotation.points.push_back({pt.x - static_cast<float>(x0),
                                         pt.y - static_cast<float>(y0)});
    }
  }
  patch.source_id = source_id;
  patch.origin_y = y0;
  patch.origin_x = x0;
  patch.mirrored = false;
  return patch;
}

Patch mirror_horizontal(const Patch& source) {
  Patch patch = source;
  patch.mirrored = true;
  const int pw = source.image.width;
  for (int y = 0; y < source.image.height; ++y) {
    for (int x = 0; x < pw; ++x) {
      patch.image.at(y, x) = source.image.at(y, pw - 1 - x);
    }
  }
  for (std::size_t i = 0; i < patch.annotation.points.size(); ++i) {
    // Integer-grid reflection; fractional points in the right half-pixel
    // sliver clamp to 0 to stay inside the patch.
    const float mirrored_x = static_cast<float>(pw - 1) - source.annotation.points[i].x;
    patch.annotation.points[i].x = std::max(0.0f, mirrored_x);
  }
  return patch;
}

}  // namespace

std::vector<Patch> make_patches(const Image& image, const Annotation& annotation,
                                std::uint64_t seed, std::string source_id) {
  if (image.height < 16 || image.width < 16) {
    throw std::invalid_argument("make_patches: image must be at least 16x16, got " +
                                std::to_string(image.height) + "x" +
                                std::to_string(image.width));
  }
  if (image.height % 2 != 0 || image.width % 2 != 0) {
    throw std::invalid_argument("make_patches: image extents must be even, got " +
                                std::to_string(image.height) + "x" +
                                std::to_string(image.width));
  }
  if (annotation.height != image.height || annotation.width != image.width) {
    throw std::invalid_argument("make_patches: annotation extent does not match the image");
  }
  validate(annotation);

  const int ph = image.height / 2;
  const int pw = image.width / 2;

  std::vector<Patch> patches;
  patches.reserve(18);

  // Four exact quarters, row-major.
  patches.push_back(crop(image, annotation, 0, 0, ph, pw, source_id));
  patches.push_back(crop(image, annotation, 0, pw, ph, pw, source_id));
  patches.push_back(crop(image, annotation, ph, 0, ph, pw, source_id));
  patches.push_back(crop(image, annotation, ph, pw, ph, pw, source_id));

  // Five random crops of the same size.
  Rng rng(seed);
  for (int i = 0; i < 5; ++i) {
    const int y0 = static_cast<int>(rng.uniform_int(0, image.height - ph));
    const int x0 = static_cast<int>(rng.uniform_int(0, image.width - pw));
    patches.push_back(crop(image, annotation, y0, x0, ph, pw, source_id));
  }

  // Horizontal mirror of each of the nine.
  for (int i = 0; i < 9; ++i) {
    patches.push_back(mirror_horizontal(patches[static_cast<std::size_t>(i)]));
  }
  return patches;
}

}  // namespace crowd
