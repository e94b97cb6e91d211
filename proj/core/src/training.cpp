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

#include "crowdcount/training.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>

#include "crowdcount/metrics.hpp"
#include "crowdcount/rng.hpp"

namespace crowd {

LossResult euclidean_loss(const Tensor& pred, const Tensor& target) {
  if (!pred.same_shape(target)) {
    throw std::invalid_argument(
        "euclidean_loss: shapes differ, (" + std::to_string(pred.batch) + ", " +
        std::to_string(pred.channels) + ", " + std::to_string(pred.height) + ", " +
        std::to_string(pred.width) + ") vs (" + std::to_string(target.batch) + ", " +
        std::to_string(target.channels) + ", " + std::to_string(target.height) + ", " +
        std::to_string(target.width) + ")");
  }
  const double batch = pred.batch;
  LossResult result;
  result.grad = Tensor(pred.batch, pred.channels, pred.height, pred.width);
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < pred.data.size(); ++i) {
    const double diff = static_cast<double>(pred.data[i]) - target.data[i];
    sum_sq += diff * diff;
    result.grad.data[i] = static_cast<float>(diff / batch);
  }
  result.value = sum_sq / (2.0 * batch);
  return result;
}

void sgd_step(std::span<float> weights, std::span<const float> grads, double learning_rate) {
  if (weights.size() != grads.size()) {
    throw std::invalid_argument("sgd_step: " + std::to_string(weights.size()) +
                                " weights vs " + std::to_string(grads.size()) + " gradients");
  }
  for (std::size_t i = 0; i < weights.size(); ++i) {
    weights[i] = static_cast<float>(weights[i] - learning_rate * grads[i]);
  }
}

DensityMap density_from_output(const Tensor& output, int item, int scale) {
  DensityMap map(output.height, output.width, scale);
  const float* plane = output.plane(item, 0);
  map.values.assign(plane, plane + static_cast<std::size_t>(output.height) * output.width);
  return map;
}

void validation_counts(const ModelConfig& config, const ModelWeights& weights,
                       const std::vector<TrainSample>& samples,
                       std::vector<double>& predicted, std::vector<double>& expected) {
  predicted.clear();
  expected.clear();
  predicted.reserve(samples.size());
  expected.reserve(samples.size());
  for (const TrainSample& sample : samples) {
    const Tensor out = forward(config, weights, to_tensor(sample.image));
    predicted.push_back(count_from_map(std::span<const float>(out.data)));
    expected.push_back(count_from_map(sample.target));
  }
}

namespace {

void check_sample(const TrainSample& sample, std::size_t index) {
  if (sample.image.height % 8 != 0 || sample.image.width % 8 != 0) {
    throw std::invalid_argument("train: sample " + std::to_string(index) +
                                " image extents must be divisible by 8");
  }
  if (sample.target.height * 8 != sample.image.height ||
      sample.target.width * 8 != sample.image.width) {
    throw std::invalid_argument("train: sample " + std::to_string(index) +
                                " target is not at 1/8 of the image extent");
  }
}

}  // namespace

void build_training_batch(const std::vector<TrainSample>& samples, std::span<const int> indices,
                          Tensor& images, Tensor& targets) {
  const TrainSample& first = samples[static_cast<std::size_t>(indices[0])];
  const int h = first.image.height;
  const int w = first.image.width;
  const int th = first.target.height;
  const int tw = first.target.width;
  const int batch = static_cast<int>(indices.size());

  images = Tensor(batch, 1, h, w);
  targets = Tensor(batch, 1, th, tw);
  for (int b = 0; b < batch; ++b) {
    const TrainSample& sample = samples[static_cast<std::size_t>(indices[b])];
    Tensor image = to_tensor(sample.image);
    Tensor target(1, 1, sample.target.height, sample.target.width);
    target.data = sample.target.values;

    if (sample.image.height != h || sample.image.width != w) {
      image = bilinear_resize(image, h, w);
      const double original_sum = std::accumulate(sample.target.values.begin(),
                                                  sample.target.values.end(), 0.0);
      target = bilinear_resize(target, th, tw);
      double resized_sum = 0.0;
      for (float v : target.data) resized_sum += v;
      if (resized_sum != 0.0) {
        const double rescale = original_sum / resized_sum;
        for (float& v : target.data) v = static_cast<float>(v * rescale);
      }
    }
    std::copy(image.data.begin(), image.data.end(), images.plane(b, 0));
    std::copy(target.data.begin(), target.data.end(), targets.plane(b, 0));
  }
}

TrainResult train(const ModelConfig& config, ModelWeights weights,
                  const std::vector<TrainSample>& train_set,
                  const std::vector<TrainSample>& val_set, const TrainConfig& train_config) {
  if (train_set.empty()) {
    throw std::invalid_argument("train: empty training set");
  }
  if (train_config.learning_rate <= 0.0) {
    throw std::invalid_argument("train: learning_rate must be > 0");
  }
  if (train_config.epochs < 1 || train_config.batch_size < 1) {
    throw std::invalid_argument("train: epochs and batch_size must be >= 1");
  }
  for (std::size_t i = 0; i < train_set.size(); ++i) check_sample(train_set[i], i);
  for (std::size_t i = 0; i < val_set.size(); ++i) check_sample(val_set[i], i);

  TrainResult result;
  result.weights = std::move(weights);
  result.logs.reserve(static_cast<std::size_t>(train_config.epochs));

  std::vector<int> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle_rng(derive_seed(train_config.seed, 0x73687566 /* shuffle stream */));

  ForwardCache cache;
  std::vector<double> val_pred, val_gt;

  for (int epoch = 1; epoch <= train_config.epochs; ++epoch) {
    const auto epoch_start = std::chrono::steady_clock::now();
    if (train_config.shuffle) shuffle_rng.shuffle(order);

    double loss_sum = 0.0;
    int batch_count = 0;
    for (std::size_t pos = 0; pos < order.size(); pos += train_config.batch_size) {
      const std::size_t end = std::min(order.size(), pos + train_config.batch_size);
      std::span<const int> indices(order.data() + pos, end - pos);

      Tensor images, targets;
      build_training_batch(train_set, indices, images, targets);
      const Tensor pred = forward(config, result.weights, images, cache);
      LossResult loss = euclidean_loss(pred, targets);
      if (!std::isfinite(loss.value)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch) +
                                 ", batch " + std::to_string(batch_count));
      }
      loss_sum += loss.value;
      ++batch_count;

      const std::vector<float> grads = backward(config, result.weights, cache, loss.grad);
      sgd_step(result.weights.values, grads, train_config.learning_rate);
    }

    EpochLog log;
    log.epoch = epoch;
    log.train_loss = loss_sum / batch_count;
    if (!val_set.empty()) {
      validation_counts(config, result.weights, val_set, val_pred, val_gt);
      const EvalReport report = evaluate(val_pred, val_gt);
      log.val_mae = report.mae;
      log.val_mse = report.mse;
    }
    log.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - epoch_start).count();
    result.logs.push_back(log);
  }
  return result;
}

void write_epoch_log_csv(const std::filesystem::path& path, std::span<const EpochLog> logs) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_epoch_log_csv: cannot open " + path.string());
  }
  out << "epoch,loss,val_mae,val_mse,seconds\n";
  char line[160];
  for (const EpochLog& log : logs) {
    std::snprintf(line, sizeof(line), "%d,%.9g,%.9g,%.9g,%.3f\n", log.epoch, log.train_loss,
                  log.val_mae, log.val_mse, log.seconds);
    out << line;
  }
}

}  // namespace crowd
