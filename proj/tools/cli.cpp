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

#include "cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "crowdcount/augmentation.hpp"
#include "crowdcount/data_io.hpp"
#include "crowdcount/ga_search.hpp"
#include "crowdcount/ground_truth.hpp"
#include "crowdcount/metrics.hpp"
#include "crowdcount/network.hpp"
#include "crowdcount/rng.hpp"
#include "crowdcount/training.hpp"

namespace crowd::cli {

namespace {

namespace fs = std::filesystem;

// Every subcommand announces its resolved settings before acting.
class ConfigPrinter {
 public:
  explicit ConfigPrinter(std::string command) {
    std::cout << "crowdcount " << command << "\n";
  }
  template <typename T>
  ConfigPrinter& line(const std::string& key, const T& value) {
    std::cout << "  " << key << " = " << value << "\n";
    return *this;
  }
  void done() { std::cout.flush(); }
};

std::string join_rates(const std::vector<int>& rates) {
  std::string s;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(rates[i]);
  }
  return s;
}

// Model selector: either a checkpoint path, or "desk[:g1,g2,g3,g4]" /
// "paper[:g1,...,g8]" for a fresh seeded model.
std::pair<ModelConfig, ModelWeights> resolve_model(const std::string& selector,
                                                   std::uint64_t seed, double init_sigma) {
  if (fs::exists(selector) && !fs::is_directory(selector)) {
    return load_checkpoint(selector);
  }
  std::string kind = selector;
  std::vector<int> genes;
  const std::size_t colon = selector.find(':');
  if (colon != std::string::npos) {
    kind = selector.substr(0, colon);
    std::istringstream gene_text(selector.substr(colon + 1));
    std::string field;
    while (std::getline(gene_text, field, ',')) {
      genes.push_back(std::stoi(field));
    }
  }
  ModelConfig config;
  if (kind == "desk") {
    if (genes.empty()) genes = {2, 2, 2, 2};
    config = make_desk_config(genes);
  } else if (kind == "paper") {
    if (genes.empty()) genes = {2, 2, 2, 2, 2, 2, 2, 2};
    config = make_paper_scale_config(genes);
  } else {
    throw std::runtime_error("unknown model selector \"" + selector +
                             "\" (expected a checkpoint path, desk[:genes] or paper[:genes])");
  }
  return {config, init_weights(config, seed, init_sigma)};
}

void print_eval_report(const DatasetManifest& manifest, const EvalReport& report) {
  std::printf("%-20s %12s %12s %12s\n", "image", "predicted", "ground_truth", "abs_error");
  for (std::size_t i = 0; i < report.per_image.size(); ++i) {
    const auto& [pred, gt] = report.per_image[i];
    std::printf("%-20s %12.3f %12.3f %12.3f\n", manifest.entries[i].stem.c_str(), pred, gt,
                std::abs(pred - gt));
  }
  std::printf("images %d\n", report.images);
  std::printf("MAE %.3f\n", report.mae);
  std::printf("MSE %.3f\n", report.mse);
}

int run_synth(int images, const SyntheticSceneSpec& spec, const std::string& out) {
  ConfigPrinter printer("synth");
  printer.line("out", out)
      .line("images", images)
      .line("size", spec.size)
      .line("heads", std::to_string(spec.min_heads) + ".." + std::to_string(spec.max_heads))
      .line("radius", std::to_string(spec.min_radius) + ".." + std::to_string(spec.max_radius))
      .line("noise", spec.noise)
      .line("seed", spec.seed)
      .done();
  const DatasetManifest manifest = generate_synthetic_dataset(spec, images, out);
  std::cout << "wrote " << manifest.entries.size() << " image/annotation pairs to "
            << manifest.root.string() << "\n";
  return 0;
}

int run_gen_gt(const std::string& dataset, const std::string& out, const GtConfig& config) {
  ConfigPrinter printer("gen-gt");
  printer.line("dataset", dataset)
      .line("out", out)
      .line("beta", config.beta)
      .line("k", config.k)
      .line("downsample", config.downsample)
      .line("fallback_sigma", config.fallback_sigma)
      .line("truncation_radius", config.truncation_radius)
      .done();
  const DatasetManifest manifest = scan_dataset(dataset);
  fs::create_directories(out);
  for (const ManifestEntry& entry : manifest.entries) {
    const Image image = read_pgm(entry.image);
    Annotation annotation;
    annotation.points = read_annotation_csv(entry.annotation);
    annotation.height = image.height;
    annotation.width = image.width;
    const DensityMap full = generate_density_map(annotation, config);
    const DensityMap down = downsample_density(full, config.downsample);
    write_dmap(fs::path(out) / (entry.stem + ".dmap"), down);
  }
  std::cout << "wrote " << manifest.entries.size() << " density maps\n";
  return 0;
}

int run_augment(const std::string& dataset, const std::string& out, std::uint64_t seed) {
  ConfigPrinter printer("augment");
  printer.line("dataset", dataset).line("out", out).line("seed", seed).done();
  const DatasetManifest manifest = scan_dataset(dataset);
  fs::create_directories(out);
  std::size_t written = 0;
  for (std::size_t i = 0; i < manifest.entries.size(); ++i) {
    const ManifestEntry& entry = manifest.entries[i];
    const Image image = read_pgm(entry.image);
    Annotation annotation;
    annotation.points = read_annotation_csv(entry.annotation);
    annotation.height = image.height;
    annotation.width = image.width;
    const std::vector<Patch> patches =
        make_patches(image, annotation, derive_seed(seed, i), entry.stem);
    for (std::size_t p = 0; p < patches.size(); ++p) {
      char suffix[16];
      std::snprintf(suffix, sizeof(suffix), "_p%02zu", p);
      const std::string stem = entry.stem + suffix;
      write_pgm(fs::path(out) / (stem + ".pgm"), patches[p].image);
      write_annotation_csv(fs::path(out) / (stem + ".csv"), patches[p].annotation.points);
      ++written;
    }
  }
  std::cout << "wrote " << written << " patches\n";
  return 0;
}

int run_train(const std::string& dataset, const std::string& val, const std::string& out,
              const std::string& model_selector, double init_sigma, const TrainConfig& config) {
  ConfigPrinter printer("train");
  printer.line("dataset", dataset)
      .line("val", val.empty() ? "(none)" : val)
      .line("out", out)
      .line("config", model_selector)
      .line("init_sigma", init_sigma)
      .line("epochs", config.epochs)
      .line("lr", config.learning_rate)
      .line("batch_size", config.batch_size)
      .line("shuffle", config.shuffle ? "true" : "false")
      .line("seed", config.seed)
      .done();

  auto [model, weights] = resolve_model(model_selector, config.seed, init_sigma);
  const std::vector<TrainSample> train_set = load_training_samples(scan_dataset(dataset));
  std::vector<TrainSample> val_set;
  if (!val.empty()) val_set = load_training_samples(scan_dataset(val));

  const TrainResult result = train(model, std::move(weights), train_set, val_set, config);

  fs::create_directories(out);
  write_epoch_log_csv(fs::path(out) / "epoch_log.csv", result.logs);
  save_checkpoint(fs::path(out) / "model.ckpt", model, result.weights);
  const EpochLog& last = result.logs.back();
  std::printf("epoch %d: loss %.6g val_mae %.3f val_mse %.3f\n", last.epoch, last.train_loss,
              last.val_mae, last.val_mse);
  return 0;
}

int run_eval(const std::string& dataset, const std::string& checkpoint,
             const std::string& csv_out) {
  ConfigPrinter printer("eval");
  printer.line("dataset", dataset)
      .line("checkpoint", checkpoint)
      .line("csv", csv_out.empty() ? "(none)" : csv_out)
      .done();
  const auto [model, weights] = load_checkpoint(checkpoint);
  const DatasetManifest manifest = scan_dataset(dataset);
  const std::vector<TrainSample> samples = load_training_samples(manifest);
  std::vector<double> predicted, expected;
  validation_counts(model, weights, samples, predicted, expected);
  const EvalReport report = evaluate(predicted, expected);
  print_eval_report(manifest, report);
  if (!csv_out.empty()) {
    std::ofstream csv(csv_out);
    if (!csv) throw std::runtime_error("cannot open " + csv_out + " for writing");
    csv << "image,predicted,ground_truth\n";
    for (std::size_t i = 0; i < report.per_image.size(); ++i) {
      char line[128];
      std::snprintf(line, sizeof(line), "%s,%.9g,%.9g\n", manifest.entries[i].stem.c_str(),
                    report.per_image[i].first, report.per_image[i].second);
      csv << line;
    }
  }
  return 0;
}

int run_predict(const std::string& checkpoint, const std::string& image_path,
                std::string out) {
  if (out.empty()) {
    out = fs::path(image_path).replace_extension(".dmap").string();
  }
  ConfigPrinter printer("predict");
  printer.line("checkpoint", checkpoint).line("image", image_path).line("out", out).done();
  const auto [model, weights] = load_checkpoint(checkpoint);
  const Image image = read_pgm(image_path);
  const Tensor output = forward(model, weights, to_tensor(image));
  const DensityMap map = density_from_output(output, 0, 8);
  write_dmap(out, map);
  std::printf("count %.3f\n", count_from_map(std::span<const float>(map.values)));
  return 0;
}

int run_ga_search(const std::string& dataset, const std::string& val, const std::string& out,
                  const GaConfig& config) {
  ConfigPrinter printer("ga-search");
  printer.line("dataset", dataset)
      .line("val", val)
      .line("out", out)
      .line("generations", config.generations)
      .line("population", config.population)
      .line("retain", config.retain_rate)
      .line("mutation", config.mutation_rate)
      .line("rates", join_rates(config.rates))
      .line("epochs_per_candidate", config.epochs_per_candidate)
      .line("batch_size", config.batch_size)
      .line("lr", config.learning_rate)
      .line("seed", config.seed)
      .done();

  const std::vector<TrainSample> train_set = load_training_samples(scan_dataset(dataset));
  const std::vector<TrainSample> val_set = load_training_samples(scan_dataset(val));
  const GaResult result = run_ga(config, training_fitness(train_set, val_set, config));

  fs::create_directories(out);
  write_ga_log_csv(fs::path(out) / "ga_log.csv", result.logs);
  write_best_json(fs::path(out) / "best.json", result.best, result.best_mae);
  std::string genes;
  for (std::size_t i = 0; i < result.best.genes.size(); ++i) {
    if (i > 0) genes += ",";
    genes += std::to_string(result.best.genes[i]);
  }
  std::printf("best genes %s val_mae %.3f\n", genes.c_str(), result.best_mae);
  return 0;
}

}  // namespace

int dispatch(int argc, const char* const* argv) {
  CLI::App app{"dilated-convolution crowd density estimation"};
  app.require_subcommand(1);

  // --- synth ---
  auto* synth = app.add_subcommand("synth", "generate a synthetic blob-scene dataset");
  SyntheticSceneSpec synth_spec;
  int synth_images = 100;
  std::string synth_out;
  synth->add_option("--out", synth_out, "output dataset directory")->required();
  synth->add_option("--images", synth_images, "number of images");
  synth->add_option("--size", synth_spec.size, "square image extent (divisible by 8)");
  synth->add_option("--min-heads", synth_spec.min_heads, "minimum heads per image");
  synth->add_option("--max-heads", synth_spec.max_heads, "maximum heads per image");
  synth->add_option("--min-radius", synth_spec.min_radius, "minimum blob radius (px)");
  synth->add_option("--max-radius", synth_spec.max_radius, "maximum blob radius (px)");
  synth->add_option("--noise", synth_spec.noise, "background noise level");
  synth->add_option("--seed", synth_spec.seed, "generator seed");

  // --- gen-gt ---
  auto* gen_gt = app.add_subcommand("gen-gt", "generate density-map ground truth");
  GtConfig gt_config;
  std::string gt_dataset, gt_out;
  gen_gt->add_option("--dataset", gt_dataset, "dataset directory")->required();
  gen_gt->add_option("--out", gt_out, "output directory (defaults to the dataset)");
  gen_gt->add_option("--beta", gt_config.beta, "bandwidth factor on the kNN mean distance");
  gen_gt->add_option("--k", gt_config.k, "neighbor count");
  gen_gt->add_option("--downsample", gt_config.downsample, "output downsample factor");
  gen_gt->add_option("--fallback-sigma", gt_config.fallback_sigma,
                     "bandwidth for single-head images (px)");
  gen_gt->add_option("--truncation", gt_config.truncation_radius,
                     "stamp cut-off in multiples of sigma");

  // --- augment ---
  auto* augment = app.add_subcommand("augment", "crop and mirror training patches");
  std::string aug_dataset, aug_out;
  std::uint64_t aug_seed = 0;
  augment->add_option("--dataset", aug_dataset, "dataset directory")->required();
  augment->add_option("--out", aug_out, "output dataset directory")->required();
  augment->add_option("--seed", aug_seed, "crop placement seed");

  // --- train ---
  auto* train_cmd = app.add_subcommand("train", "train a model with SGD");
  TrainConfig train_config;
  train_config.epochs = 50;
  std::string train_dataset, train_val, train_out, train_model = "desk:2,2,2,2";
  double train_init_sigma = 0.01;
  bool no_shuffle = false;
  train_cmd->add_option("--dataset", train_dataset, "training dataset directory")->required();
  train_cmd->add_option("--val", train_val, "validation dataset directory");
  train_cmd->add_option("--out", train_out, "output directory")->required();
  train_cmd->add_option("--config", train_model,
                        "checkpoint path, desk[:g1,g2,g3,g4] or paper[:g1..g8]");
  train_cmd->add_option("--init-sigma", train_init_sigma,
                        "weight init spread for fresh models (use ~0.1 when training from "
                        "scratch; 0.01 suits fine-tuning)");
  train_cmd->add_option("--epochs", train_config.epochs, "epoch budget");
  train_cmd->add_option("--lr", train_config.learning_rate, "SGD learning rate");
  train_cmd->add_option("--batch-size", train_config.batch_size, "batch size");
  train_cmd->add_option("--seed", train_config.seed, "training seed");
  train_cmd->add_flag("--no-shuffle", no_shuffle, "keep the sample order fixed");

  // --- eval ---
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a dataset");
  std::string eval_dataset, eval_checkpoint, eval_csv;
  eval_cmd->add_option("--dataset", eval_dataset, "dataset directory")->required();
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "model checkpoint")->required();
  eval_cmd->add_option("--csv", eval_csv, "optional per-image CSV output path");

  // --- predict ---
  auto* predict_cmd = app.add_subcommand("predict", "predict one image's density map");
  std::string pred_checkpoint, pred_image, pred_out;
  predict_cmd->add_option("--checkpoint", pred_checkpoint, "model checkpoint")->required();
  predict_cmd->add_option("--image", pred_image, "input PGM image")->required();
  predict_cmd->add_option("--out", pred_out, "output density-map path");

  // --- ga-search ---
  auto* ga_cmd = app.add_subcommand("ga-search", "evolve back-end dilation rates");
  GaConfig ga_config;
  std::string ga_dataset, ga_val, ga_out, ga_rates = "2,3,4,5";
  ga_cmd->add_option("--dataset", ga_dataset, "training dataset directory")->required();
  ga_cmd->add_option("--val", ga_val, "validation dataset directory")->required();
  ga_cmd->add_option("--out", ga_out, "output directory")->required();
  ga_cmd->add_option("--generations", ga_config.generations, "generation count");
  ga_cmd->add_option("--population", ga_config.population, "population size");
  ga_cmd->add_option("--retain", ga_config.retain_rate, "parent survival rate");
  ga_cmd->add_option("--mutation", ga_config.mutation_rate, "child mutation probability");
  ga_cmd->add_option("--rates", ga_rates, "admissible dilation rates, comma separated");
  ga_cmd->add_option("--epochs-per-candidate", ga_config.epochs_per_candidate,
                     "training epochs per candidate");
  ga_cmd->add_option("--batch-size", ga_config.batch_size, "candidate training batch size");
  ga_cmd->add_option("--lr", ga_config.learning_rate, "candidate training learning rate");
  ga_cmd->add_option("--seed", ga_config.seed, "search seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (synth->parsed()) {
      return run_synth(synth_images, synth_spec, synth_out);
    }
    if (gen_gt->parsed()) {
      return run_gen_gt(gt_dataset, gt_out.empty() ? gt_dataset : gt_out, gt_config);
    }
    if (augment->parsed()) {
      return run_augment(aug_dataset, aug_out, aug_seed);
    }
    if (train_cmd->parsed()) {
      train_config.shuffle = !no_shuffle;
      return run_train(train_dataset, train_val, train_out, train_model, train_init_sigma,
                       train_config);
    }
    if (eval_cmd->parsed()) {
      return run_eval(eval_dataset, eval_checkpoint, eval_csv);
    }
    if (predict_cmd->parsed()) {
      return run_predict(pred_checkpoint, pred_image, pred_out);
    }
    if (ga_cmd->parsed()) {
      ga_config.rates.clear();
      std::istringstream rate_text(ga_rates);
      std::string field;
      while (std::getline(rate_text, field, ',')) {
        ga_config.rates.push_back(std::stoi(field));
      }
      return run_ga_search(ga_dataset, ga_val, ga_out, ga_config);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

int dispatch(const std::vector<std::string>& args) {
  std::vector<const char*> argv;
  argv.reserve(args.size() + 1);
  argv.push_back("crowdcount");
  for (const std::string& arg : args) argv.push_back(arg.c_str());
  return dispatch(static_cast<int>(argv.size()), argv.data());
}

}  // namespace crowd::cli
