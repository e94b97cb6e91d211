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

#include <cmath>

#include <stdexcept>

#include <doctest.h>

#include "crowdcount/augmentation.hpp"
#include "crowdcount/rng.hpp"
#include "oracles.hpp"

using namespace crowd;

namespace {

Image random_image(Rng& rng, int h, int w) {
  Image image(h, w);
  for (float& v : image.pixels) v = static_cast<float>(rng.uniform01());
  return image;
}

Annotation random_annotation(Rng& rng, int h, int w, int count) {
  Annotation annotation;
  annotation.height = h;
  annotation.width = w;
  for (int i = 0; i < count; ++i) {
    annotation.points.push_back({static_cast<float>(rng.uniform01() * (w - 1)),
                                 static_cast<float>(rng.uniform01() * (h - 1))});
  }
  return annotation;
}

bool same_patch(const Patch& a, const Patch& b) {
  if (a.image.pixels != b.image.pixels || a.origin_y != b.origin_y ||
      a.origin_x != b.origin_x || a.mirrored != b.mirrored) {
    return false;
  }
  if (a.annotation.points.size() != b.annotation.points.size()) return false;
  for (std::size_t i = 0; i < a.annotation.points.size(); ++i) {
    if (a.annotation.points[i].x != b.annotation.points[i].x ||
        a.annotation.points[i].y != b.annotation.points[i].y) {
      return false;
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("augmentation") {

TEST_CASE("quarters sit at the four half-extent origins") {
  Rng rng(1);
  const Image image = random_image(rng, 16, 20);
  Annotation annotation;
  annotation.height = 16;
  annotation.width = 20;
  const auto patches = make_patches(image, annotation, 0);
  REQUIRE(patches.size() == 18);

  const std::vector<std::pair<int, int>> origins = {{0, 0}, {0, 10}, {8, 0}, {8, 10}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(patches[i].origin_y == origins[i].first);
    CHECK(patches[i].origin_x == origins[i].second);
    CHECK(patches[i].image.height == 8);
    CHECK(patches[i].image.width == 10);
    CHECK_FALSE(patches[i].mirrored);
    // Pixel content equals the source crop.
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 10; ++x) {
        REQUIRE(patches[i].image.at(y, x) ==
                image.at(origins[i].first + y, origins[i].second + x));
      }
    }
  }
}

TEST_CASE("a point on the vertical midline belongs to the right quarter only") {
  Rng rng(2);
  const Image image = random_image(rng, 16, 16);
  Annotation annotation;
  annotation.height = 16;
  annotation.width = 16;
  annotation.points = {{8.0f, 3.0f}};  // x exactly on the boundary
  const auto patches = make_patches(image, annotation, 0);
  CHECK(patches[0].annotation.points.empty());
  REQUIRE(patches[1].annotation.points.size() == 1);
  CHECK(patches[1].annotation.points[0].x == 0.0f);
  CHECK(patches[1].annotation.points[0].y == 3.0f);
}

TEST_CASE("quarter membership conserves the total point count") {
  Rng rng(3);
  const Image image = random_image(rng, 32, 48);
  const Annotation annotation = random_annotation(rng, 32, 48, 30);
  const auto patches = make_patches(image, annotation, 7);

  std::size_t quarter_total = 0;
  for (int i = 0; i < 4; ++i) quarter_total += patches[i].annotation.points.size();
  CHECK(quarter_total == 30);

  // Every mirrored patch keeps its source's point count.
  for (int i = 0; i < 9; ++i) {
    CHECK(patches[9 + i].annotation.points.size() == patches[i].annotation.points.size());
    CHECK(patches[9 + i].mirrored);
    CHECK(patches[9 + i].origin_y == patches[i].origin_y);
    CHECK(patches[9 + i].origin_x == patches[i].origin_x);
  }
}

TEST_CASE("every remapped point lies inside its patch") {
  Rng rng(4);
  const Image image = random_image(rng, 32, 32);
  const Annotation annotation = random_annotation(rng, 32, 32, 40);
  const auto patches = make_patches(image, annotation, 11);
  for (const Patch& patch : patches) {
    for (const Point& pt : patch.annotation.points) {
      CHECK(pt.x >= 0.0f);
      CHECK(pt.x < static_cast<float>(patch.image.width));
      CHECK(pt.y >= 0.0f);
      CHECK(pt.y < static_cast<float>(patch.image.height));
    }
  }
}

TEST_CASE("mirroring is an involution on pixels and integer-grid points") {
  Rng rng(5);
  const Image image = random_image(rng, 24, 24);
  Annotation annotation;
  annotation.height = 24;
  annotation.width = 24;
  // Integer-grid points, so reflection is exact.
  annotation.points = {{0.0f, 1.0f}, {5.0f, 2.0f}, {11.0f, 11.0f}, {23.0f, 20.0f}};
  const auto patches = make_patches(image, annotation, 0);

  for (int i = 0; i < 9; ++i) {
    const Patch& source = patches[i];
    const Patch& mirrored = patches[9 + i];
    const int pw = source.image.width;
    // Reflecting the mirror reproduces the source pixels.
    for (int y = 0; y < source.image.height; ++y) {
      for (int x = 0; x < pw; ++x) {
        REQUIRE(mirrored.image.at(y, pw - 1 - x) == source.image.at(y, x));
      }
    }
    REQUIRE(mirrored.annotation.points.size() == source.annotation.points.size());
    for (std::size_t p = 0; p < source.annotation.points.size(); ++p) {
      CHECK(mirrored.annotation.points[p].x ==
            static_cast<float>(pw - 1) - source.annotation.points[p].x);
      CHECK(mirrored.annotation.points[p].y == source.annotation.points[p].y);
    }
  }
}

TEST_CASE("the same seed reproduces the patch set bit for bit") {
  Rng rng(6);
  const Image image = random_image(rng, 40, 40);
  const Annotation annotation = random_annotation(rng, 40, 40, 12);
  const auto first = make_patches(image, annotation, 99, "frame");
  const auto second = make_patches(image, annotation, 99, "frame");
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(same_patch(first[i], second[i]));
  }

  const auto other_seed = make_patches(image, annotation, 100, "frame");
  bool any_difference = false;
  for (std::size_t i = 4; i < 9; ++i) {
    if (!same_patch(first[i], other_seed[i])) any_difference = true;
  }
  CHECK(any_difference);
}

TEST_CASE("random crop origins stay within the valid range") {
  Rng rng(7);
  const Image image = random_image(rng, 32, 48);
  Annotation annotation;
  annotation.height = 32;
  annotation.width = 48;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto patches = make_patches(image, annotation, seed);
    for (int i = 4; i < 9; ++i) {
      CHECK(patches[i].origin_y >= 0);
      CHECK(patches[i].origin_y <= 16);
      CHECK(patches[i].origin_x >= 0);
      CHECK(patches[i].origin_x <= 24);
    }
  }
}

TEST_CASE("undersized or odd images are rejected") {
  Annotation annotation;
  annotation.height = 8;
  annotation.width = 8;
  CHECK_THROWS_WITH_AS(make_patches(Image(8, 8), annotation, 0),
                       doctest::Contains("at least 16x16"), std::invalid_argument);
  annotation.height = 18;
  annotation.width = 17;
  CHECK_THROWS_WITH_AS(make_patches(Image(18, 17), annotation, 0), doctest::Contains("even"),
                       std::invalid_argument);
}

}  // TEST_SUITE
