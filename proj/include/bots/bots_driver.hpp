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

#ifndef BOTS_BOTS_DRIVER_HPP_
#define BOTS_BOTS_DRIVER_HPP_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bots/acquisition.hpp"
#include "bots/environment.hpp"
#include "bots/gp.hpp"
#include "bots/xts_policy.hpp"

namespace bots {

// Failure inside a run, tagged with the phase (-1 for the MRT) and the
// candidate index (-1 when not tied to one candidate).
class RunError : public std::runtime_error {
 public:
  RunError(int round, int candidate, const std::string& what)
      : std::runtime_error("round " + std::to_string(round) + ", candidate " +
                           std::to_string(candidate) + ": " + what),
        round_(round),
        candidate_(candidate) {}
  int round() const { return round_; }
  int candidate() const { return candidate_; }

 private:
  int round_;
  int candidate_;
};

enum class SearchSpace { kBeta, kBetaSharedVariance, kBetaPerActionVariance };
enum class BoMode { kGlobal, kTurbo };
enum class PriorStrategy { kFixed, kUpdate };

SearchSpace ParseSearchSpace(std::string_view name);
std::string_view SearchSpaceName(SearchSpace space);
BoMode ParseBoMode(std::string_view name);
std::string_view BoModeName(BoMode mode);
PriorStrategy ParsePriorStrategy(std::string_view name);
std::string_view PriorStrategyName(PriorStrategy strategy);

// Episodes per phase: the micro-randomized trial, then round 0 (Sobol) and
// rounds 1..R (acquisition).
struct BudgetSchedule {
  int mrt_episodes = 0;
  std::vector<int> batch_sizes;

  int total() const;
  int rounds() const { return static_cast<int>(batch_sizes.size()) - 1; }
  bool operator==(const BudgetSchedule&) const = default;
};

// [sobol, (total - mrt - sobol) / R repeated R times]. Throws ConfigError
// when the remainder is negative or does not split evenly.
BudgetSchedule MakeSchedule(int total, int mrt, int sobol, int rounds);

struct BotsConfig {
  SearchSpace search_space = SearchSpace::kBeta;
  BoMode bo_mode = BoMode::kTurbo;
  PriorStrategy prior_strategy = PriorStrategy::kFixed;
  BudgetSchedule schedule = MakeSchedule(140, 10, 10, 6);
  std::uint64_t base_seed = 0;

  double beta_lower = -100.0;
  double beta_upper = 0.0;
  double variance_lower = 0.1;
  double variance_upper = 2500.0;

  // Broad base prior N(prior_mean * 1, prior_scale * I), noise variance
  // prior_sigma_y2.
  double prior_mean = 0.0;
  double prior_scale = 100.0;
  double prior_sigma_y2 = 625.0;

  QeiOptions acquisition;
  int gp_random_starts = 5;
  int jobs = 1;

  // When set, every candidate equals this vector and no surrogate is fit.
  // Used for the beta = 0 baseline path.
  std::optional<VectorXd> fixed_candidate;
};

int SearchDimension(SearchSpace space, int num_actions);
ParamBounds SearchBounds(const BotsConfig& cfg, int num_actions);

struct DecodedCandidate {
  VectorXd beta;      // length A + 1, beta[0] = 0
  VectorXd sigma_y2;  // length A + 1
};

// beta-only: [b_1..b_A]; shared: [b_1..b_A, v]; per-action:
// [b_1..b_A, v_0..v_A].
DecodedCandidate DecodeCandidate(SearchSpace space, const VectorXd& v,
                                 int num_actions, double default_sigma_y2);

// Fixed returns mrt_beliefs; Update refits base_beliefs on every trace.
BeliefSet ApplyPriorStrategy(PriorStrategy strategy,
                             const BeliefSet& base_beliefs,
                             const BeliefSet& mrt_beliefs,
                             std::span<const EpisodeTrace> all_traces);

struct EpisodeRecord {
  VectorXd params;  // original units; empty for MRT episodes
  double total_return = 0.0;
  int length = 0;
  bool terminated_early = false;
};

struct RoundRecord {
  int round = 0;
  std::vector<EpisodeRecord> episodes;
  std::optional<GpHyperparameters> gp;     // surrogate used to pick this batch
  std::optional<TrustRegionState> trust_region;  // state after this round
  double acquisition_value = 0.0;
  int acquisition_restarts = 0;
  double best_so_far = 0.0;
};

struct RunRecord {
  int repetition = 0;
  std::uint64_t base_seed = 0;
  std::vector<EpisodeRecord> mrt;
  std::vector<RoundRecord> rounds;
  BeliefSet mrt_beliefs;
  BeliefSet final_beliefs;
  std::optional<nlohmann::json> final_surrogate;
  double average_return = 0.0;  // over every episode, MRT included

  int episodes() const;
  // Returns of every episode in schedule order, MRT first.
  std::vector<double> Returns() const;
};

// Runs the micro-randomized trial, the Sobol round and the acquisition
// rounds for one repetition. Episode b of phase p uses
// EpisodeSeed(base_seed, repetition, p, b) with phase 0 the MRT, so a run is
// a pure function of (cfg, repetition).
RunRecord RunBots(const BotsConfig& cfg, const EnvFactory& env_factory,
                  int repetition);

nlohmann::json ToJson(const RunRecord& record);

}  // namespace bots

#endif  // BOTS_BOTS_DRIVER_HPP_
