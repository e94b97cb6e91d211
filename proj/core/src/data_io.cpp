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

#include "crowdcount/data_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "crowdcount/rng.hpp"

namespace crowd {

namespace {

// ---- little-endian primitives ----------------------------------------------

void put_u32_le(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void put_f32_le(std::string& out, float v) {
  std::uint32_t bits = 0;
  std::memcpy(&bits, &v, sizeof(bits));
  put_u32_le(out, bits);
}

class ByteReader {
 public:
  ByteReader(std::string data, std::string name)
      : data_(std::move(data)), name_(std::move(name)) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) {
      v = (v << 8) | static_cast<unsigned char>(data_[pos_ + static_cast<std::size_t>(i)]);
    }
    pos_ += 4;
    return v;
  }

  float f32() {
    const std::uint32_t bits = u32();
    float v = 0.0f;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
  }

  std::string bytes(std::size_t n) {
    need(n);
    std::string s = data_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool exhausted() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  void need(std::size_t n) {
    if (data_.size() - pos_ < n) {
      throw std::runtime_error(name_ + ": truncated file");
    }
  }

  std::string data_;
  std::string name_;
  std::size_t pos_ = 0;
};

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

void spill(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw std::runtime_error("short write to " + path.string());
  }
}

// PGM header token reader: skips whitespace and '#' comment lines.
int pgm_token(const std::string& data, std::size_t& pos, const std::string& name) {
  while (pos < data.size()) {
    const char c = data[pos];
    if (c == '#') {
      while (pos < data.size() && data[pos] != '\n') ++pos;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++pos;
    } else {
      break;
    }
  }
  if (pos >= data.size() || !std::isdigit(static_cast<unsigned char>(data[pos]))) {
    throw std::runtime_error(name + ": malformed PGM header");
  }
  int value = 0;
  while (pos < data.size() && std::isdigit(static_cast<unsigned char>(data[pos]))) {
    value = value * 10 + (data[pos] - '0');
    ++pos;
  }
  return value;
}

}  // namespace

// ---- PGM --------------------------------------------------------------------

Image read_pgm(const std::filesystem::path& path) {
  const std::string data = slurp(path);
  const std::string name = path.string();
  if (data.size() < 2 || data[0] != 'P' || data[1] != '5') {
    throw std::runtime_error(name + ": not a binary P5 PGM");
  }
  std::size_t pos = 2;
  const int width = pgm_token(data, pos, name);
  const int height = pgm_token(data, pos, name);
  const int maxval = pgm_token(data, pos, name);
  if (maxval != 255) {
    throw std::runtime_error(name + ": unsupported maxval " + std::to_string(maxval) +
                             " (expected 255)");
  }
  if (width < 1 || height < 1) {
    throw std::runtime_error(name + ": bad image extents in header");
  }
  if (pos >= data.size() || !std::isspace(static_cast<unsigned char>(data[pos]))) {
    throw std::runtime_error(name + ": malformed PGM header");
  }
  ++pos;  // single whitespace byte after maxval
  const std::size_t expected = static_cast<std::size_t>(width) * height;
  if (pos + expected > data.size()) {
    throw std::runtime_error(name + ": truncated pixel payload");
  }
  Image image(height, width);
  for (std::size_t i = 0; i < expected; ++i) {
    image.pixels[i] = static_cast<float>(static_cast<unsigned char>(data[pos + i])) / 255.0f;
  }
  return image;
}

void write_pgm(const std::filesystem::path& path, const Image& image) {
  std::string bytes;
  bytes.reserve(static_cast<std::size_t>(image.height) * image.width + 32);
  bytes += "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  for (float v : image.pixels) {
    const float clamped = std::min(1.0f, std::max(0.0f, v));
    bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0f))));
  }
  spill(path, bytes);
}

// ---- annotation CSV ----------------------------------------------------------

std::vector<Point> read_annotation_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path.string());
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw std::runtime_error(path.string() + ": missing x,y header");
  }
  while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
  if (line != "x,y") {
    throw std::runtime_error(path.string() + ": missing x,y header (got \"" + line + "\")");
  }
  std::vector<Point> points;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
    if (line.empty()) continue;
    const std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error(path.string() + ": row " + std::to_string(row) +
                               " has no comma");
    }
    try {
      std::size_t used = 0;
      const float x = std::stof(line.substr(0, comma), &used);
      if (used != comma) throw std::invalid_argument("trailing junk");
      const std::string y_text = line.substr(comma + 1);
      const float y = std::stof(y_text, &used);
      if (used != y_text.size()) throw std::invalid_argument("trailing junk");
      points.push_back({x, y});
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ": non-numeric field in row " +
                               std::to_string(row));
    }
  }
  return points;
}

void write_annotation_csv(const std::filesystem::path& path, std::span<const Point> points) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("cannot open " + path.string() + " for writing");
  }
  out << "x,y\n";
  char line[80];
  for (const Point& pt : points) {
    std::snprintf(line, sizeof(line), "%.9g,%.9g\n", static_cast<double>(pt.x),
                  static_cast<double>(pt.y));
    out << line;
  }
}

// ---- density map -------------------------------------------------------------

DensityMap read_dmap(const std::filesystem::path& path) {
  ByteReader reader(slurp(path), path.string());
  if (reader.bytes(4) != "DMAP") {
    throw std::runtime_error(path.string() + ": bad magic (expected DMAP)");
  }
  const std::uint32_t height = reader.u32();
  const std::uint32_t width = reader.u32();
  const std::uint32_t scale = reader.u32();
  const std::size_t expected = static_cast<std::size_t>(height) * width;
  if (reader.remaining() != expected * 4) {
    throw std::runtime_error(path.string() + ": payload holds " +
                             std::to_string(reader.remaining() / 4) + " values, header claims " +
                             std::to_string(expected));
  }
  DensityMap map(static_cast<int>(height), static_cast<int>(width), static_cast<int>(scale));
  for (std::size_t i = 0; i < expected; ++i) {
    map.values[i] = reader.f32();
  }
  return map;
}

void write_dmap(const std::filesystem::path& path, const DensityMap& map) {
  std::string bytes;
  bytes.reserve(16 + map.values.size() * 4);
  bytes += "DMAP";
  put_u32_le(bytes, static_cast<std::uint32_t>(map.height));
  put_u32_le(bytes, static_cast<std::uint32_t>(map.width));
  put_u32_le(bytes, static_cast<std::uint32_t>(map.scale));
  for (float v : map.values) put_f32_le(bytes, v);
  spill(path, bytes);
}

// ---- model config text and checkpoints ---------------------------------------

std::string serialize_config(const ModelConfig& config) {
  std::ostringstream out;
  out << "crowdcount config v1\n";
  out << "in_channels " << config.in_channels << "\n";
  auto emit = [&out](const LayerSpec& layer) {
    switch (layer.kind) {
      case LayerKind::Conv:
        out << "conv " << layer.out_channels << " " << layer.kernel << " " << layer.dilation
            << " " << layer.padding << "\n";
        break;
      case LayerKind::MaxPool2:
        out << "pool\n";
        break;
      case LayerKind::Relu:
        out << "relu\n";
        break;
    }
  };
  out << "front " << config.front_end.size() << "\n";
  for (const LayerSpec& layer : config.front_end) emit(layer);
  out << "back " << config.back_end.size() << "\n";
  for (const LayerSpec& layer : config.back_end) emit(layer);
  out << "head\n";
  emit(config.head);
  return std::move(out).str();
}

namespace {

LayerSpec parse_layer_line(const std::string& line) {
  std::istringstream in(line);
  std::string kind;
  in >> kind;
  if (kind == "pool") return LayerSpec::pool();
  if (kind == "relu") return LayerSpec::relu();
  if (kind == "conv") {
    LayerSpec layer;
    layer.kind = LayerKind::Conv;
    if (!(in >> layer.out_channels >> layer.kernel >> layer.dilation >> layer.padding)) {
      throw std::runtime_error("config: malformed conv line \"" + line + "\"");
    }
    return layer;
  }
  throw std::runtime_error("config: unknown layer kind \"" + kind + "\"");
}

}  // namespace

ModelConfig parse_config(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next_line = [&]() {
    if (!std::getline(in, line)) {
      throw std::runtime_error("config: unexpected end of text");
    }
    return line;
  };
  if (next_line() != "crowdcount config v1") {
    throw std::runtime_error("config: unknown format line \"" + line + "\"");
  }
  ModelConfig config;
  std::istringstream header(next_line());
  std::string word;
  if (!(header >> word >> config.in_channels) || word != "in_channels") {
    throw std::runtime_error("config: expected in_channels line");
  }

  auto read_section = [&](const std::string& name, std::vector<LayerSpec>& target) {
    std::istringstream section(next_line());
    std::size_t count = 0;
    if (!(section >> word >> count) || word != name) {
      throw std::runtime_error("config: expected " + name + " section");
    }
    target.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      target.push_back(parse_layer_line(next_line()));
    }
  };
  read_section("front", config.front_end);
  read_section("back", config.back_end);
  if (next_line() != "head") {
    throw std::runtime_error("config: expected head section");
  }
  config.head = parse_layer_line(next_line());
  validate(config);
  return config;
}

void save_checkpoint(const std::filesystem::path& path, const ModelConfig& config,
                     const ModelWeights& weights) {
  if (weights.values.size() != parameter_count(config)) {
    throw std::invalid_argument("save_checkpoint: weight count does not match the config");
  }
  const std::string text = serialize_config(config);
  std::string bytes;
  bytes.reserve(12 + text.size() + weights.values.size() * 4);
  bytes += "CKPT";
  put_u32_le(bytes, static_cast<std::uint32_t>(text.size()));
  bytes += text;
  put_u32_le(bytes, static_cast<std::uint32_t>(weights.values.size()));
  for (float v : weights.values) put_f32_le(bytes, v);
  spill(path, bytes);
}

std::pair<ModelConfig, ModelWeights> load_checkpoint(const std::filesystem::path& path) {
  ByteReader reader(slurp(path), path.string());
  if (reader.bytes(4) != "CKPT") {
    throw std::runtime_error(path.string() + ": bad magic (expected CKPT)");
  }
  const std::uint32_t text_len = reader.u32();
  const std::string text = reader.bytes(text_len);
  ModelConfig config = parse_config(text);
  const std::uint32_t count = reader.u32();
  if (reader.remaining() != static_cast<std::size_t>(count) * 4) {
    throw std::runtime_error(path.string() + ": weight payload holds " +
                             std::to_string(reader.remaining() / 4) +
                             " values, header claims " + std::to_string(count));
  }
  ModelWeights weights;
  weights.values.resize(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    weights.values[i] = reader.f32();
  }
  if (weights.values.size() != parameter_count(config)) {
    throw std::runtime_error(path.string() + ": weight count does not match the stored config");
  }
  return {std::move(config), std::move(weights)};
}

// ---- datasets -----------------------------------------------------------------

DatasetManifest scan_dataset(const std::filesystem::path& dir, std::string split) {
  if (!std::filesystem::is_directory(dir)) {
    throw std::runtime_error("scan_dataset: " + dir.string() + " is not a directory");
  }
  DatasetManifest manifest;
  manifest.root = dir;
  manifest.split = split.empty() ? dir.filename().string() : std::move(split);

  std::map<std::string, ManifestEntry> by_stem;  // ordered, stems unique
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const std::filesystem::path& p = entry.path();
    const std::string stem = p.stem().string();
    const std::string ext = p.extension().string();
    ManifestEntry& slot = by_stem[stem];
    slot.stem = stem;
    if (ext == ".pgm") {
      slot.image = p;
    } else if (ext == ".csv") {
      slot.annotation = p;
    } else if (ext == ".dmap") {
      slot.dmap = p;
    }
  }
  for (auto& [stem, entry] : by_stem) {
    if (entry.image.empty() && entry.annotation.empty()) continue;  // stray file kinds
    if (entry.image.empty() || entry.annotation.empty()) {
      throw std::runtime_error("scan_dataset: stem \"" + stem +
                               "\" is missing its image or annotation file");
    }
    manifest.entries.push_back(std::move(entry));
  }
  return manifest;
}

DatasetManifest generate_synthetic_dataset(const SyntheticSceneSpec& spec, int n_images,
                                           const std::filesystem::path& out_dir) {
  if (spec.size < 32 || spec.size % 8 != 0) {
    throw std::invalid_argument("synthetic spec: size must be >= 32 and divisible by 8");
  }
  if (spec.min_heads < 0 || spec.max_heads < spec.min_heads) {
    throw std::invalid_argument("synthetic spec: bad head count range");
  }
  if (!(spec.min_radius > 0.0) || spec.max_radius < spec.min_radius) {
    throw std::invalid_argument("synthetic spec: bad blob radius range");
  }
  std::filesystem::create_directories(out_dir);

  Rng rng(spec.seed);
  const int size = spec.size;
  const double margin = spec.max_radius + 1.0;
  // Keeps neighboring blob summits resolvable for peak inspection.
  const double min_separation = 2.5 * spec.max_radius;

  for (int image_index = 0; image_index < n_images; ++image_index) {
    const int heads = static_cast<int>(rng.uniform_int(spec.min_heads, spec.max_heads));
    std::vector<Point> centers;
    centers.reserve(static_cast<std::size_t>(heads));
    int attempts = 0;
    while (static_cast<int>(centers.size()) < heads && attempts < 20000) {
      ++attempts;
      const float x =
          static_cast<float>(margin + rng.uniform01() * (size - 1 - 2.0 * margin));
      const float y =
          static_cast<float>(margin + rng.uniform01() * (size - 1 - 2.0 * margin));
      bool ok = true;
      for (const Point& c : centers) {
        const double dx = c.x - x;
        const double dy = c.y - y;
        if (dx * dx + dy * dy < min_separation * min_separation) {
          ok = false;
          break;
        }
      }
      if (ok) centers.push_back({x, y});
    }
    if (static_cast<int>(centers.size()) < heads) {
      throw std::runtime_error("generate_synthetic_dataset: could not place " +
                               std::to_string(heads) + " heads in a " + std::to_string(size) +
                               "x" + std::to_string(size) + " scene");
    }

    Image image(size, size);
    for (const Point& c : centers) {
      const double radius = spec.min_radius + rng.uniform01() * (spec.max_radius - spec.min_radius);
      const double amplitude = 0.55 + 0.35 * rng.uniform01();
      const double sigma = radius / 2.0;
      const int extent = static_cast<int>(std::ceil(3.0 * radius));
      const int cy = static_cast<int>(std::lround(c.y));
      const int cx = static_cast<int>(std::lround(c.x));
      for (int y = std::max(0, cy - extent); y <= std::min(size - 1, cy + extent); ++y) {
        for (int x = std::max(0, cx - extent); x <= std::min(size - 1, cx + extent); ++x) {
          const double d_sq = (y - c.y) * (y - c.y) + (x - c.x) * (x - c.x);
          image.at(y, x) += static_cast<float>(amplitude * std::exp(-d_sq / (2.0 * sigma * sigma)));
        }
      }
    }
    for (float& v : image.pixels) {
      v += static_cast<float>(spec.noise * rng.uniform01());
      v = std::min(1.0f, std::max(0.0f, v));
    }

    char stem[32];
    std::snprintf(stem, sizeof(stem), "img%04d", image_index);
    write_pgm(out_dir / (std::string(stem) + ".pgm"), image);
    write_annotation_csv(out_dir / (std::string(stem) + ".csv"), centers);
  }
  return scan_dataset(out_dir);
}

std::vector<TrainSample> load_training_samples(const DatasetManifest& manifest,
                                               const GtConfig& gt_config) {
  std::vector<TrainSample> samples;
  samples.reserve(manifest.entries.size());
  for (const ManifestEntry& entry : manifest.entries) {
    TrainSample sample;
    sample.image = read_pgm(entry.image);
    if (entry.dmap) {
      sample.target = read_dmap(*entry.dmap);
    } else {
      Annotation annotation;
      annotation.points = read_annotation_csv(entry.annotation);
      annotation.height = sample.image.height;
      annotation.width = sample.image.width;
      const DensityMap full = generate_density_map(annotation, gt_config);
      sample.target = downsample_density(full, gt_config.downsample);
    }
    samples.push_back(std::move(sample));
  }
  return samples;
}

}  // namespace crowd
