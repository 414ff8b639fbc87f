// Copyright 2026 The BOTS Authors. All rights reserved.
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

#ifndef BOTS_EXPERIMENT_HPP_
#define BOTS_EXPERIMENT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bots/baselines.hpp"
#include "bots/bots_driver.hpp"
#include "bots/jitai.hpp"

namespace bots {

enum class Method { kBotsGlobal, kBotsTurbo, kTsFixed, kTsUpdate, kQLearning };

Method ParseMethod(std::string_view name);
std::string_view MethodName(Method method);

// One experiment: a method on an environment for a number of repetitions.
struct ExperimentConfig {
  std::string name = "experiment";
  std::string environment = "jitai";  // jitai | mdp1 | mdp2 | mdp3
  Method method = Method::kBotsTurbo;
  SearchSpace search_space = SearchSpace::kBeta;
  PriorStrategy prior_strategy = PriorStrategy::kFixed;

  int total_episodes = 140;
  int mrt_episodes = 10;
  int sobol_episodes = 10;
  int rounds = 6;
  int repetitions = 10;
  std::uint64_t seed = 0;

  JitaiConfig jitai;
  FeatureMode feature_mode = FeatureMode::kProbability;

  double beta_lower = -100.0;
  double beta_upper = 0.0;
  double variance_lower = 0.1;
  double variance_upper = 2500.0;
  double prior_mean = 0.0;
  double prior_scale = 100.0;
  double prior_sigma_y2 = 625.0;

  QeiOptions acquisition;
  int gp_random_starts = 5;
  QLearningHyper q_learning;

  std::string output_dir = "out";

  // Throws ConfigError on incompatible or out-of-range settings.
  void Validate() const;
  bool operator==(const ExperimentConfig&) const;
};

// Grid axes over ExperimentConfig fields. Supported axes: method,
// search_space, prior_strategy, environment, rounds.
struct SweepConfig {
  ExperimentConfig base;
  std::map<std::string, std::vector<nlohmann::json>> axes;

  int cells() const;
  // Cartesian product in axis-name order, last axis fastest.
  std::vector<ExperimentConfig> Expand() const;
};

nlohmann::json ToJson(const ExperimentConfig& cfg);
// Unknown keys and wrong types throw ConfigError naming the field.
ExperimentConfig ExperimentFromJson(const nlohmann::json& j);
nlohmann::json ToJson(const SweepConfig& cfg);
SweepConfig SweepFromJson(const nlohmann::json& j);

// Reads a JSON file; parse and field errors become ConfigError carrying
// "path:line: message".
nlohmann::json LoadConfigFile(const std::filesystem::path& path);
ExperimentConfig LoadExperiment(const std::filesystem::path& path);
SweepConfig LoadSweep(const std::filesystem::path& path);

EnvFactory MakeEnvFactory(const ExperimentConfig& cfg);
BotsConfig MakeBotsConfig(const ExperimentConfig& cfg);

// Per-repetition result in the schema shared by all methods.
struct RepetitionResult {
  int repetition = 0;
  std::vector<double> returns;  // every episode in order
  double average_return = 0.0;
  nlohmann::json record;
  std::string summary_rows;   // summary.csv body lines
  std::string episode_rows;   // episodes.csv body lines
};

RepetitionResult RunRepetition(const ExperimentConfig& cfg, int repetition);

struct Aggregate {
  int repetitions = 0;
  double mean_avg_return = 0.0;
  double stderr_avg_return = 0.0;  // sample sd / sqrt(repetitions)
};

Aggregate AggregateReturns(const std::vector<double>& per_repetition);

std::string SummaryHeader(int param_dim);
std::string EpisodeHeader(int param_dim);
int ParamDimension(const ExperimentConfig& cfg);

// Runs every repetition and writes runs/<name>/ under `out_dir`:
// record_rep<i>.json, summary.csv, episodes.csv, aggregate.csv, config.json.
// Returns the directory written.
std::filesystem::path RunExperiment(const ExperimentConfig& cfg,
                                    const std::filesystem::path& out_dir,
                                    int jobs, Aggregate* aggregate = nullptr);

// Runs every cell under sweeps/<name>/cells/ and writes sweeps/<name>/
// sweep.csv and sweep.json. Returns the sweep directory.
std::filesystem::path RunSweep(const SweepConfig& cfg,
                               const std::filesystem::path& out_dir, int jobs);

// Long-format rows (method, search_space, rounds, batch, mean_avg_return,
// stderr) ordered by method then rounds. Missing cells are reported on
// `warnings` and skipped. Writes plotdata.csv in `sweep_dir`.
std::filesystem::path WritePlotData(const std::filesystem::path& sweep_dir,
                                    std::ostream& warnings);

}  // namespace bots

#endif  // BOTS_EXPERIMENT_HPP_
