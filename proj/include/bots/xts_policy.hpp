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

#ifndef BOTS_XTS_POLICY_HPP_
#define BOTS_XTS_POLICY_HPP_

#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bots/environment.hpp"
#include "bots/reward_model.hpp"

namespace bots {

// Parameters of one extended Thompson sampling policy. The utility of action
// a is a posterior reward sample plus beta[a]; beta[0] is pinned to zero.
struct XtsParams {
  VectorXd beta;
  BeliefSet beliefs;
  bool update_within_episode = true;

  int num_actions() const { return static_cast<int>(beta.size()); }
  // Throws InvalidInput on size mismatch, non-zero beta[0] or non-finite
  // entries.
  void Validate() const;
};

struct EpisodeStep {
  VectorXd features;
  int action = 0;
  double reward = 0.0;
};

struct EpisodeTrace {
  std::vector<EpisodeStep> steps;
  double total_return = 0.0;
  bool terminated_early = false;
  // Beliefs after the last within-episode update.
  BeliefSet final_beliefs;

  int length() const { return static_cast<int>(steps.size()); }
};

// An environment or model failure inside an episode, tagged with the step.
class EpisodeError : public std::runtime_error {
 public:
  EpisodeError(int step, const std::string& what)
      : std::runtime_error("step " + std::to_string(step) + ": " + what),
        step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

// Samples one weight vector per action in index order and returns the
// argmax of sample^T s + beta[a]. Ties go to the lowest index.
int SelectAction(const VectorXd& beta, const BeliefSet& beliefs,
                 const VectorXd& features, Rng& rng);

inline int SelectAction(const XtsParams& params, const BeliefSet& beliefs_now,
                        const VectorXd& features, Rng& rng) {
  return SelectAction(params.beta, beliefs_now, features, rng);
}

// Resets `env` with `rng`, then alternates observe, select, step and update
// until the horizon or termination. Draw order per step: the action
// selection draws, then whatever the environment step consumes. The input
// beliefs are copied, never mutated.
EpisodeTrace RunEpisode(Environment& env, const XtsParams& params, Rng& rng);

// One episode with actions uniform over all actions; no model involved.
EpisodeTrace RunRandomEpisode(Environment& env, Rng& rng);

// Pools (s, a, r) over the traces and fits each action's belief from the
// matching base prior.
BeliefSet FitBeliefs(const BeliefSet& base_prior,
                     std::span<const EpisodeTrace> traces);

// Micro-randomized trial: n independent uniformly randomized episodes, then
// FitBeliefs on the pooled data.
BeliefSet RunMrt(const EnvFactory& env_factory, int n_episodes,
                 const BeliefSet& base_prior, Rng& rng);

// One JSON object per line: t, features, action, reward.
void WriteTraceJsonl(std::ostream& os, const EpisodeTrace& trace);
EpisodeTrace ReadTraceJsonl(std::istream& is);

}  // namespace bots

#endif  // BOTS_XTS_POLICY_HPP_
