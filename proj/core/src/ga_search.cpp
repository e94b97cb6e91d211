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

#include "crowdcount/ga_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace crowd {

namespace {

void check_config(const GaConfig& config) {
  if (config.population < 2) {
    throw std::invalid_argument("ga: population must be >= 2");
  }
  if (config.generations < 1) {
    throw std::invalid_argument("ga: generations must be >= 1");
  }
  if (!(config.retain_rate > 0.0 && config.retain_rate < 1.0)) {
    throw std::invalid_argument("ga: retain_rate must lie in (0, 1)");
  }
  if (config.mutation_rate < 0.0 || config.mutation_rate > 1.0) {
    throw std::invalid_argument("ga: mutation_rate must lie in [0, 1]");
  }
  if (config.rates.empty()) {
    throw std::invalid_argument("ga: the dilation rate list is empty");
  }
  if (config.gene_count < 1) {
    throw std::invalid_argument("ga: gene_count must be >= 1");
  }
}

int parent_count(double retain_rate, int population) {
  return std::max(2, static_cast<int>(std::lround(retain_rate * population)));
}

std::string genes_string(const Chromosome& chromosome) {
  std::string s;
  for (std::size_t i = 0; i < chromosome.genes.size(); ++i) {
    if (i > 0) s += '-';
    s += std::to_string(chromosome.genes[i]);
  }
  return s;
}

}  // namespace

std::vector<Chromosome> init_population(const GaConfig& config, Rng& rng) {
  check_config(config);
  std::vector<Chromosome> population(static_cast<std::size_t>(config.population));
  for (Chromosome& chromosome : population) {
    chromosome.genes.resize(static_cast<std::size_t>(config.gene_count));
    for (int& gene : chromosome.genes) {
      gene = config.rates[rng.index(config.rates.size())];
    }
  }
  return population;
}

std::vector<int> select_parents(std::span<const double> maes, double retain_rate) {
  std::vector<int> order(maes.size());
  std::iota(order.begin(), order.end(), 0);
  // Stable sort keeps the lower candidate index on MAE ties.
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return maes[a] < maes[b]; });
  const int keep = std::min<int>(parent_count(retain_rate, static_cast<int>(maes.size())),
                                 static_cast<int>(maes.size()));
  order.resize(static_cast<std::size_t>(keep));
  return order;
}

std::vector<Chromosome> crossover_breed(const std::vector<Chromosome>& parents, int needed,
                                        Rng& rng) {
  if (parents.size() < 2) {
    throw std::invalid_argument("crossover_breed: need at least 2 parents, got " +
                                std::to_string(parents.size()));
  }
  std::vector<Chromosome> children;
  children.reserve(static_cast<std::size_t>(std::max(0, needed)));
  for (int c = 0; c < needed; ++c) {
    const std::size_t first = rng.index(parents.size());
    std::size_t second = rng.index(parents.size() - 1);
    if (second >= first) ++second;  // distinct pick
    const Chromosome& a = parents[first];
    const Chromosome& b = parents[second];
    Chromosome child;
    child.genes.resize(a.genes.size());
    for (std::size_t g = 0; g < child.genes.size(); ++g) {
      child.genes[g] = rng.uniform01() < 0.5 ? a.genes[g] : b.genes[g];
    }
    children.push_back(std::move(child));
  }
  return children;
}

Chromosome mutate(const Chromosome& child, double mutation_rate, std::span<const int> rates,
                  Rng& rng) {
  if (rates.empty()) {
    throw std::invalid_argument("mutate: empty rate list");
  }
  if (rng.uniform01() >= mutation_rate) return child;

  Chromosome mutated = child;
  const std::size_t gene_count = mutated.genes.size();
  const std::size_t redraws = static_cast<std::size_t>(
      std::ceil(0.2 * static_cast<double>(gene_count)));

  // Partial Fisher-Yates picks a uniform subset of positions to redraw.
  std::vector<std::size_t> positions(gene_count);
  std::iota(positions.begin(), positions.end(), 0);
  for (std::size_t i = 0; i < redraws && i < gene_count; ++i) {
    const std::size_t j = i + rng.index(gene_count - i);
    std::swap(positions[i], positions[j]);
    mutated.genes[positions[i]] = rates[rng.index(rates.size())];
  }
  return mutated;
}

GaResult run_ga(const GaConfig& config, const FitnessFn& fitness) {
  check_config(config);
  Rng rng(config.seed);
  std::vector<Chromosome> population = init_population(config, rng);

  GaResult result;
  result.best_mae = std::numeric_limits<double>::infinity();

  for (int generation = 1; generation <= config.generations; ++generation) {
    GenerationLog log;
    log.generation = generation;
    std::vector<double> maes(population.size());
    for (std::size_t i = 0; i < population.size(); ++i) {
      double mae = fitness(population[i], generation, static_cast<int>(i));
      if (std::isnan(mae)) mae = std::numeric_limits<double>::infinity();
      maes[i] = mae;
      log.scored.push_back({population[i], mae});
    }

    log.parent_indices = select_parents(maes, config.retain_rate);

    std::vector<Chromosome> parents;
    parents.reserve(log.parent_indices.size());
    for (int idx : log.parent_indices) {
      parents.push_back(population[static_cast<std::size_t>(idx)]);
    }

    const int needed = config.population - static_cast<int>(parents.size());
    std::vector<Chromosome> children = crossover_breed(parents, needed, rng);
    for (Chromosome& child : children) {
      child = mutate(child, config.mutation_rate, config.rates, rng);
    }
    log.children = children;

    if (generation == config.generations) {
      // The answer is the best member of the final evaluated generation.
      const std::size_t best_idx = static_cast<std::size_t>(log.parent_indices[0]);
      result.best = population[best_idx];
      result.best_mae = maes[best_idx];
    }

    result.logs.push_back(std::move(log));

    population = std::move(parents);
    for (Chromosome& child : children) population.push_back(std::move(child));
  }
  return result;
}

double evaluate_fitness(const Chromosome& chromosome, const std::vector<TrainSample>& train_set,
                        const std::vector<TrainSample>& val_set, const GaConfig& config,
                        int generation, int candidate) {
  const ModelConfig model = make_desk_config(chromosome.genes);
  const std::uint64_t seed = derive_seed(config.seed, static_cast<std::uint64_t>(generation),
                                         static_cast<std::uint64_t>(candidate));
  ModelWeights weights = init_weights(model, seed);

  TrainConfig train_config;
  train_config.learning_rate = config.learning_rate;
  train_config.epochs = config.epochs_per_candidate;
  train_config.batch_size = config.batch_size;
  train_config.seed = seed;
  const TrainResult trained = train(model, std::move(weights), train_set, val_set, train_config);

  const double mae = trained.logs.back().val_mae;
  return std::isnan(mae) ? std::numeric_limits<double>::infinity() : mae;
}

FitnessFn training_fitness(const std::vector<TrainSample>& train_set,
                           const std::vector<TrainSample>& val_set, const GaConfig& config) {
  return [&train_set, &val_set, config](const Chromosome& chromosome, int generation,
                                        int candidate) {
    return evaluate_fitness(chromosome, train_set, val_set, config, generation, candidate);
  };
}

void write_ga_log_csv(const std::filesystem::path& path, std::span<const GenerationLog> logs) {
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_ga_log_csv: cannot open " + path.string());
  }
  out << "generation,candidate,genes,val_mae\n";
  char line[128];
  for (const GenerationLog& log : logs) {
    for (std::size_t i = 0; i < log.scored.size(); ++i) {
      std::snprintf(line, sizeof(line), "%d,%zu,%s,%.9g\n", log.generation, i,
                    genes_string(log.scored[i].chromosome).c_str(), log.scored[i].mae);
      out << line;
    }
  }
}

void write_best_json(const std::filesystem::path& path, const Chromosome& best, double mae) {
  nlohmann::json doc;
  doc["genes"] = best.genes;
  doc["val_mae"] = mae;
  std::ofstream out(path);
  if (!out) {
    throw std::runtime_error("write_best_json: cannot open " + path.string());
  }
  out << doc.dump(2) << "\n";
}

}  // namespace crowd
