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

#ifndef BOTS_TABULAR_MDP_HPP_
#define BOTS_TABULAR_MDP_HPP_

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bots/environment.hpp"

namespace bots {

// Deterministic finite MDP given by transition and reward tables.
struct TabularMdp {
  int n_states = 0;
  int n_actions = 0;
  std::vector<std::vector<int>> transition;  // [state][action] -> next state
  std::vector<std::vector<double>> reward;   // [state][action]
  std::vector<double> start;                 // distribution over states
  int horizon = 1;

  void Validate() const;
  bool operator==(const TabularMdp&) const = default;
};

TabularMdp Mdp1();
TabularMdp Mdp2();
TabularMdp Mdp3();
// "mdp1" | "mdp2" | "mdp3"
TabularMdp BuiltinMdp(std::string_view name);

struct MdpTransition {
  int next_state = 0;
  double reward = 0.0;
};

MdpTransition MdpStep(const TabularMdp& mdp, int state, int action);
int MdpReset(const TabularMdp& mdp, Rng& rng);

// [1, one_hot(state)]
Eigen::VectorXd MdpObserve(const TabularMdp& mdp, int state);

struct ValueIterationResult {
  // Optimal undiscounted-by-default return to go from each state at t = 0.
  std::vector<double> value;
  // policy[t][s]: optimal action with horizon - t steps remaining.
  std::vector<std::vector<int>> policy;
  // Expectation of value under the start distribution.
  double expected_start_value = 0.0;
};

// Finite-horizon dynamic programming, ties resolved to the lowest action.
ValueIterationResult ValueIteration(const TabularMdp& mdp, double gamma,
                                    int horizon);

// Expected return of a stationary deterministic policy over the start
// distribution, following the tables for `mdp.horizon` steps.
double EvaluatePolicy(const TabularMdp& mdp, const std::vector<int>& policy);

class TabularEnvironment final : public Environment {
 public:
  explicit TabularEnvironment(TabularMdp mdp);

  void Reset(Rng& rng) override;
  Eigen::VectorXd Observe() const override;
  StepResult Step(int action, Rng& rng) override;

  int num_actions() const override { return mdp_.n_actions; }
  int feature_dim() const override { return mdp_.n_states + 1; }
  int horizon() const override { return mdp_.horizon; }

  int state() const { return state_; }
  const TabularMdp& mdp() const { return mdp_; }

 private:
  TabularMdp mdp_;
  int state_ = 0;
  int t_ = 0;
};

void to_json(nlohmann::json& j, const TabularMdp& mdp);
void from_json(const nlohmann::json& j, TabularMdp& mdp);

}  // namespace bots

#endif  // BOTS_TABULAR_MDP_HPP_
