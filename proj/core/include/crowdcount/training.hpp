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

#ifndef CROWDCOUNT_TRAINING_HPP
#define CROWDCOUNT_TRAINING_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "crowdcount/ground_truth.hpp"
#include "crowdcount/image.hpp"
#include "crowdcount/network.hpp"

namespace crowd {

struct TrainConfig {
  double learning_rate = 1e-5;
  int epochs = 1;
  int batch_size = 1;
  std::uint64_t seed = 0;
  bool shuffle = true;
};

struct EpochLog {
  int epoch = 0;
  double train_loss = 0.0;
  double val_mae = 0.0;
  double val_mse = 0.0;
  double seconds = 0.0;  // wall time; the one field not covered by determinism
};

/// One training pair: a grayscale image and its density target at 1/8 of
/// the image extent.
struct TrainSample {
  Image image;
  DensityMap target;
};

struct LossResult {
  double value = 0.0;
  Tensor grad;
};

/// loss = (1 / 2D) * sum ||pred_i - target_i||^2 over the batch of size D;
/// grad = (pred - target) / D.
LossResult euclidean_loss(const Tensor& pred, const Tensor& target);

/// Plain w <- w - lr * g. No momentum, no weight decay.
void sgd_step(std::span<float> weights, std::span<const float> grads, double learning_rate);

struct TrainResult {
  ModelWeights weights;
  std::vector<EpochLog> logs;
};

/// SGD over the sample set for a fixed epoch budget. Shuffle order and
/// batching are derived from the config seed, so identical inputs give
/// identical logs and weights apart from wall time. Batches larger than one
/// are size-unified by bilinear resize to the first item's extent, with
/// density targets rescaled to preserve their totals. An empty validation
/// set logs zero MAE/MSE. A non-finite loss aborts with the epoch and batch
/// in the message.
TrainResult train(const ModelConfig& config, ModelWeights weights,
                  const std::vector<TrainSample>& train_set,
                  const std::vector<TrainSample>& val_set, const TrainConfig& train_config);

/// Validation counts of a model over a sample set, computed one image at a
/// time at native resolution.
void validation_counts(const ModelConfig& config, const ModelWeights& weights,
                       const std::vector<TrainSample>& samples,
                       std::vector<double>& predicted, std::vector<double>& expected);

/// Stacks the indexed samples into one batch, bilinearly resizing images and
/// targets to the first item's extent. Resized targets are rescaled by
/// (original sum / resized sum) so each map keeps its count.
void build_training_batch(const std::vector<TrainSample>& samples, std::span<const int> indices,
                          Tensor& images, Tensor& targets);

/// Single-channel output plane of one batch item as a density map.
DensityMap density_from_output(const Tensor& output, int item = 0, int scale = 8);

/// CSV with header epoch,loss,val_mae,val_mse,seconds.
void write_epoch_log_csv(const std::filesystem::path& path, std::span<const EpochLog> logs);

}  // namespace crowd

#endif  // CROWDCOUNT_TRAINING_HPP
