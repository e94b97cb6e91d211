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

#ifndef CROWDCOUNT_DATA_IO_HPP
#define CROWDCOUNT_DATA_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "crowdcount/ground_truth.hpp"
#include "crowdcount/image.hpp"
#include "crowdcount/network.hpp"
#include "crowdcount/training.hpp"

namespace crowd {

// ---------------------------------------------------------------------------
// File formats. All binary formats are little-endian and round-trip exactly.
// ---------------------------------------------------------------------------

/// Binary P5 PGM, maxval 255. Pixels map to f32 in [0, 1] as v / 255.
Image read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Image& image);

/// CSV with header `x,y`, one head per row.
std::vector<Point> read_annotation_csv(const std::filesystem::path& path);
void write_annotation_csv(const std::filesystem::path& path, std::span<const Point> points);

/// Magic "DMAP", then u32 height, u32 width, u32 scale, then
/// height * width f32 values, row-major, all little-endian.
DensityMap read_dmap(const std::filesystem::path& path);
void write_dmap(const std::filesystem::path& path, const DensityMap& map);

/// Magic "CKPT", a length-prefixed canonical config text, then a
/// count-prefixed f32 weight payload. load(save(...)) is bit-identical.
void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     const ModelWeights& weights);
std::pair<ModelConfig, ModelWeights> load_checkpoint(const std::filesystem::path& path);

/// Canonical text form of a model config; the inverse of parse_config.
std::string serialize_config(const ModelConfig& config);
ModelConfig parse_config(const std::string& text);

// ---------------------------------------------------------------------------
// Datasets
// ---------------------------------------------------------------------------

/// One dataset entry: <stem>.pgm plus <stem>.csv, with an optional
/// precomputed <stem>.dmap.
struct ManifestEntry {
  std::string stem;
  std::filesystem::path image;
  std::filesystem::path annotation;
  std::optional<std::filesystem::path> dmap;
};

struct DatasetManifest {
  std::filesystem::path root;
  std::string split;
  std::vector<ManifestEntry> entries;  // sorted by stem
};

/// Scans a flat dataset directory. Every .pgm must have a matching .csv.
DatasetManifest scan_dataset(const std::filesystem::path& dir, std::string split = {});

/// Synthetic crowd-scene settings: bright Gaussian blobs on a noisy
/// background, with the exact blob centers written as the annotation.
struct SyntheticSceneSpec {
  int size = 64;  // square images, divisible by 8
  int min_heads = 5;
  int max_heads = 20;
  double min_radius = 1.5;
  double max_radius = 3.0;
  double noise = 0.03;
  std::uint64_t seed = 0;
};

/// Writes n_images PGM/CSV pairs (img0000, img0001, ...) into out_dir and
/// returns the resulting manifest. Deterministic per seed.
DatasetManifest generate_synthetic_dataset(const SyntheticSceneSpec& spec, int n_images,
                                           const std::filesystem::path& out_dir);

/// Loads images and density targets for training. Entries with a .dmap use
/// it directly; the rest generate ground truth from the annotation with the
/// supplied config.
std::vector<TrainSample> load_training_samples(const DatasetManifest& manifest,
                                               const GtConfig& gt_config = {});

}  // namespace crowd

#endif  // CROWDCOUNT_DATA_IO_HPP
