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

#ifndef BOTS_BASELINES_HPP_
#define BOTS_BASELINES_HPP_

#include <vector>

#include <Eigen/Core>

#include "bots/bots_driver.hpp"
#include "bots/tabular_mdp.hpp"

namespace bots {

struct QLearningHyper {
  double lr = 0.8;
  double gamma = 0.99;
  double eps_start = 1.0;
  double eps_end = 0.01;
  double eps_decay = 0.1;  // epsilon *= (1 - eps_decay) after each episode

  void Validate() const;
};

struct QLearningResult {
  std::vector<double> returns;          // per training episode
  std::vector<double> epsilons;         // epsilon used in each episode
  std::vector<double> greedy_returns;   // greedy-policy value after each episode
  std::vector<int> greedy_policy;       // final
  Eigen::MatrixXd q;                    // states x actions
};

// One-step tabular Q-learning with epsilon-greedy exploration; greedy ties
// go to the lowest action.
QLearningResult QLearningRun(const TabularMdp& mdp, const QLearningHyper& hyper,
                             int n_episodes, Rng& rng);

// Standard Thompson sampling: the BOTS driver with every action bias pinned
// at zero, so episode seeds and priors match a BOTS run with the same
// configuration. kFixed keeps the (MRT-fitted or broad) prior for every
// episode; kUpdate refits it after every round, which for unit batches is
// the chained posterior across episodes.
RunRecord RunTsBaseline(BotsConfig cfg, const EnvFactory& env_factory,
                        int repetition);

// Sequential variant of RunTsBaseline: n_episodes rounds of one episode
// each, no MRT, broad prior from `cfg`.
RunRecord RunSequentialTs(BotsConfig cfg, const EnvFactory& env_factory,
                          int n_episodes, int repetition);

}  // namespace bots

#endif  // BOTS_BASELINES_HPP_
