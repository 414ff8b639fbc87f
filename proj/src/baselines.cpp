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

#include "bots/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "bots/errors.hpp"

namespace bots {
namespace {

int Greedy(const Eigen::MatrixXd& q, int state) {
  int best = 0;
  for (int a = 1; a < q.cols(); ++a) {
    if (q(state, a) > q(state, best)) best = a;
  }
  return best;
}

std::vector<int> GreedyPolicy(const Eigen::MatrixXd& q) {
  std::vector<int> policy(static_cast<std::size_t>(q.rows()));
  for (int s = 0; s < q.rows(); ++s) policy[s] = Greedy(q, s);
  return policy;
}

}  // namespace

void QLearningHyper::Validate() const {
  if (!(lr > 0.0 && lr <= 1.0)) throw ConfigError("q_learning.lr must be in (0, 1]");
  if (!(gamma > 0.0 && gamma <= 1.0)) {
    throw ConfigError("q_learning.gamma must be in (0, 1]");
  }
  if (!(eps_end >= 0.0 && eps_end <= eps_start && eps_start <= 1.0)) {
    throw ConfigError("q_learning epsilon schedule must satisfy 0 <= end <= start <= 1");
  }
  if (!(eps_decay > 0.0 && eps_decay < 1.0)) {
    throw ConfigError("q_learning.eps_decay must be in (0, 1)");
  }
}

QLearningResult QLearningRun(const TabularMdp& mdp, const QLearningHyper& hyper,
                             int n_episodes, Rng& rng) {
  mdp.Validate();
  hyper.Validate();
  QLearningResult out;
  out.q = Eigen::MatrixXd::Zero(mdp.n_states, mdp.n_actions);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::uniform_int_distribution<int> random_action(0, mdp.n_actions - 1);

  double epsilon = hyper.eps_start;
  for (int ep = 0; ep < n_episodes; ++ep) {
    out.epsilons.push_back(epsilon);
    int s = MdpReset(mdp, rng);
    double ret = 0.0;
    for (int t = 0; t < mdp.horizon; ++t) {
      const int a = unif(rng) < epsilon ? random_action(rng) : Greedy(out.q, s);
      const auto tr = MdpStep(mdp, s, a);
      // The horizon is a time limit, not a terminal state: always bootstrap.
      const double bootstrap = hyper.gamma * out.q.row(tr.next_state).maxCoeff();
      out.q(s, a) += hyper.lr * (tr.reward + bootstrap - out.q(s, a));
      ret += tr.reward;
      s = tr.next_state;
    }
    out.returns.push_back(ret);
    out.greedy_returns.push_back(EvaluatePolicy(mdp, GreedyPolicy(out.q)));
    epsilon = std::max(hyper.eps_end, epsilon * (1.0 - hyper.eps_decay));
  }
  out.greedy_policy = GreedyPolicy(out.q);
  return out;
}

RunRecord RunTsBaseline(BotsConfig cfg, const EnvFactory& env_factory,
                        int repetition) {
  const int num_actions = env_factory()->num_actions();
  cfg.search_space = SearchSpace::kBeta;
  cfg.fixed_candidate = VectorXd::Zero(SearchDimension(cfg.search_space, num_actions));
  return RunBots(cfg, env_factory, repetition);
}

RunRecord RunSequentialTs(BotsConfig cfg, const EnvFactory& env_factory,
                          int n_episodes, int repetition) {
  if (n_episodes < 1) throw ConfigError("sequential TS needs at least one episode");
  cfg.schedule = MakeSchedule(n_episodes, 0, 1, n_episodes - 1);
  return RunTsBaseline(std::move(cfg), env_factory, repetition);
}

}  // namespace bots
