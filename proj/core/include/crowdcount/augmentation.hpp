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

#ifndef CROWDCOUNT_AUGMENTATION_HPP
#define CROWDCOUNT_AUGMENTATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "crowdcount/ground_truth.hpp"
#include "crowdcount/image.hpp"

namespace crowd {

/// Half-height x half-width crop with its annotation points remapped to
/// patch-local coordinates.
struct Patch {
  Image image;
  Annotation annotation;
  std::string source_id;
  int origin_y = 0;
  int origin_x = 0;
  bool mirrored = false;
};

/// Training patches for one frame: the four exact quarters, five random
/// crops of the same size, then a horizontal mirror of each, 18 in total.
/// Points are assigned to crops by half-open interval membership
/// [x0, x0 + w) x [y0, y0 + h). Requires even extents of at least 16.
std::vector<Patch> make_patches(const Image& image, const Annotation& annotation,
                                std::uint64_t seed, std::string source_id = {});

}  // namespace crowd

#endif  // CROWDCOUNT_AUGMENTATION_HPP
