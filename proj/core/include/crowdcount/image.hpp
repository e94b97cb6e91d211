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

#ifndef CROWDCOUNT_IMAGE_HPP
#define CROWDCOUNT_IMAGE_HPP

#include <vector>

#include "crowdcount/tensor.hpp"

namespace crowd {

/// Grayscale image, values in [0, 1], row-major.
struct Image {
  int height = 0;
  int width = 0;
  std::vector<float> pixels;

  Image() = default;
  Image(int height, int width, float fill = 0.0f)
      : height(height), width(width),
        pixels(static_cast<std::size_t>(height) * width, fill) {}

  float& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

inline Tensor to_tensor(const Image& image) {
  Tensor t(1, 1, image.height, image.width);
  t.data = image.pixels;
  return t;
}

}  // namespace crowd

#endif  // CROWDCOUNT_IMAGE_HPP
