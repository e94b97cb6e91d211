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

#ifndef CROWDCOUNT_GA_SEARCH_HPP
#define CROWDCOUNT_GA_SEARCH_HPP

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "crowdcount/rng.hpp"
#include "crowdcount/training.hpp"

namespace crowd {

/// Ordered back-end dilation rates, one gene per back-end convolution.
struct Chromosome {
  std::vector<int> genes;
  bool operator==(const Chromosome&) const = default;
};

struct GaConfig {
  int generations = 7;
  int population = 7;
  double retain_rate = 0.4;
  double mutation_rate = 0.2;
  std::vector<int> rates = {2, 3, 4, 5};  // admissible gene values
  int gene_count = 4;
  int epochs_per_candidate = 20;
  int batch_size = 8;
  double learning_rate = 1e-5;
  std::uint64_t seed = 0;
};

struct ScoredChromosome {
  Chromosome chromosome;
  double mae = 0.0;
};

struct GenerationLog {
  int generation = 0;
  std::vector<ScoredChromosome> scored;  // the evaluated population, in order
  std::vector<int> parent_indices;       // indices into `scored`
  std::vector<Chromosome> children;      // bred for the next generation
};

/// Fitness seam: validation MAE of a candidate, addressed by generation and
/// candidate index so implementations can derive private deterministic
/// seeds. Lower is better; NaN is treated as +infinity by the search.
using FitnessFn = std::function<double(const Chromosome&, int generation, int candidate)>;

struct GaResult {
  Chromosome best;
  double best_mae = 0.0;
  std::vector<GenerationLog> logs;
};

/// Population chromosomes with genes drawn uniformly from the rate list.
std::vector<Chromosome> init_population(const GaConfig& config, Rng& rng);

/// Indices of the max(2, round(retain_rate * population)) lowest-MAE
/// candidates; ties break toward the lower index.
std::vector<int> select_parents(std::span<const double> maes, double retain_rate);

/// Each child chooses every gene uniformly between two distinct randomly
/// drawn parents. Requires at least two parents.
std::vector<Chromosome> crossover_breed(const std::vector<Chromosome>& parents, int needed,
                                        Rng& rng);

/// With probability mutation_rate, redraws a uniformly chosen subset of
/// ceil(0.2 * gene_count) genes from the rate list; otherwise returns the
/// child unchanged.
Chromosome mutate(const Chromosome& child, double mutation_rate,
                  std::span<const int> rates, Rng& rng);

/// Generation loop: every member of the current population is (re)evaluated,
/// the fittest become parents, children are bred and mutated to refill the
/// population. Returns the argmin-MAE member of the final evaluated
/// generation plus the full per-generation logs.
GaResult run_ga(const GaConfig& config, const FitnessFn& fitness);

/// Training-backed fitness: builds the desk model from the genes, trains it
/// for epochs_per_candidate with a seed derived from (config seed,
/// generation, candidate), and returns the final validation MAE.
double evaluate_fitness(const Chromosome& chromosome, const std::vector<TrainSample>& train_set,
                        const std::vector<TrainSample>& val_set, const GaConfig& config,
                        int generation, int candidate);

FitnessFn training_fitness(const std::vector<TrainSample>& train_set,
                           const std::vector<TrainSample>& val_set, const GaConfig& config);

/// CSV with header generation,candidate,genes,val_mae; genes joined by '-'.
void write_ga_log_csv(const std::filesystem::path& path, std::span<const GenerationLog> logs);

/// {"genes": [...], "val_mae": ...}
void write_best_json(const std::filesystem::path& path, const Chromosome& best, double mae);

}  // namespace crowd

#endif  // CROWDCOUNT_GA_SEARCH_HPP
