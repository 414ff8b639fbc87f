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

#include "bots/tabular_mdp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "bots/errors.hpp"

namespace bots {
namespace {

constexpr int kBasicHorizon = 100;

void CheckIndices(const TabularMdp& mdp, int state, int action) {
  if (state < 0 || state >= mdp.n_states) {
    throw InvalidInput("state " + std::to_string(state) + " out of range");
  }
  if (action < 0 || action >= mdp.n_actions) {
    throw InvalidInput("action " + std::to_string(action) + " out of range");
  }
}

}  // namespace

void TabularMdp::Validate() const {
  if (n_states < 1 || n_actions < 1) {
    throw ConfigError("mdp needs at least one state and one action");
  }
  if (horizon < 1) throw ConfigError("mdp horizon must be at least 1");
  if (static_cast<int>(transition.size()) != n_states ||
      static_cast<int>(reward.size()) != n_states ||
      static_cast<int>(start.size()) != n_states) {
    throw ConfigError("mdp tables must have one row per state");
  }
  for (int s = 0; s < n_states; ++s) {
    if (static_cast<int>(transition[s].size()) != n_actions ||
        static_cast<int>(reward[s].size()) != n_actions) {
      throw ConfigError("mdp tables must have one column per action");
    }
    for (int next : transition[s]) {
      if (next < 0 || next >= n_states) {
        throw ConfigError("mdp transition target out of range");
      }
    }
    for (double r : reward[s]) {
      if (!std::isfinite(r)) throw ConfigError("mdp reward must be finite");
    }
    if (start[s] < 0.0) throw ConfigError("mdp start weights must be >= 0");
  }
  const double total = std::accumulate(start.begin(), start.end(), 0.0);
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("mdp start distribution must sum to 1");
  }
}

TabularMdp Mdp1() {
  return {2, 2, {{0, 1}, {0, 1}}, {{0, 10}, {10, 0}}, {1.0, 0.0},
          kBasicHorizon};
}

TabularMdp Mdp2() {
  return {2, 2, {{0, 1}, {1, 1}}, {{1, 10}, {0, 0}}, {1.0, 0.0},
          kBasicHorizon};
}

TabularMdp Mdp3() {
  return {4,
          2,
          {{0, 0}, {0, 1}, {2, 3}, {3, 3}},
          {{0, 0}, {10, 1}, {1, 10}, {0, 0}},
          {0.0, 0.5, 0.5, 0.0},
          kBasicHorizon};
}

TabularMdp BuiltinMdp(std::string_view name) {
  if (name == "mdp1") return Mdp1();
  if (name == "mdp2") return Mdp2();
  if (name == "mdp3") return Mdp3();
  throw ConfigError("unknown mdp '" + std::string(name) + "'");
}

MdpTransition MdpStep(const TabularMdp& mdp, int state, int action) {
  CheckIndices(mdp, state, action);
  return {mdp.transition[state][action], mdp.reward[state][action]};
}

int MdpReset(const TabularMdp& mdp, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double u = unif(rng);
  double acc = 0.0;
  for (int s = 0; s < mdp.n_states; ++s) {
    acc += mdp.start[s];
    if (u < acc) return s;
  }
  // Rounding at the top of the cumulative sum.
  for (int s = mdp.n_states - 1; s >= 0; --s) {
    if (mdp.start[s] > 0.0) return s;
  }
  return 0;
}

Eigen::VectorXd MdpObserve(const TabularMdp& mdp, int state) {
  if (state < 0 || state >= mdp.n_states) {
    throw InvalidInput("state out of range");
  }
  Eigen::VectorXd s = Eigen::VectorXd::Zero(mdp.n_states + 1);
  s(0) = 1.0;
  s(state + 1) = 1.0;
  return s;
}

ValueIterationResult ValueIteration(const TabularMdp& mdp, double gamma,
                                    int horizon) {
  ValueIterationResult out;
  std::vector<double> next(mdp.n_states, 0.0);
  out.policy.assign(horizon, std::vector<int>(mdp.n_states, 0));
  for (int t = horizon - 1; t >= 0; --t) {
    std::vector<double> cur(mdp.n_states, 0.0);
    for (int s = 0; s < mdp.n_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < mdp.n_actions; ++a) {
        const double q =
            mdp.reward[s][a] + gamma * next[mdp.transition[s][a]];
        if (q > best) {
          best = q;
          out.policy[t][s] = a;
        }
      }
      cur[s] = best;
    }
    next = std::move(cur);
  }
  out.value = next;
  for (int s = 0; s < mdp.n_states; ++s) {
    out.expected_start_value += mdp.start[s] * out.value[s];
  }
  return out;
}

double EvaluatePolicy(const TabularMdp& mdp, const std::vector<int>& policy) {
  if (static_cast<int>(policy.size()) != mdp.n_states) {
    throw InvalidInput("policy must assign an action to every state");
  }
  double expected = 0.0;
  for (int s0 = 0; s0 < mdp.n_states; ++s0) {
    if (mdp.start[s0] == 0.0) continue;
    int s = s0;
    double ret = 0.0;
    for (int t = 0; t < mdp.horizon; ++t) {
      const auto tr = MdpStep(mdp, s, policy[s]);
      ret += tr.reward;
      s = tr.next_state;
    }
    expected += mdp.start[s0] * ret;
  }
  return expected;
}

TabularEnvironment::TabularEnvironment(TabularMdp mdp) : mdp_(std::move(mdp)) {
  mdp_.Validate();
}

void TabularEnvironment::Reset(Rng& rng) {
  state_ = MdpReset(mdp_, rng);
  t_ = 0;
}

Eigen::VectorXd TabularEnvironment::Observe() const {
  return MdpObserve(mdp_, state_);
}

StepResult TabularEnvironment::Step(int action, Rng& /*rng*/) {
  if (t_ >= mdp_.horizon) throw InvalidInput("mdp episode already finished");
  const auto tr = MdpStep(mdp_, state_, action);
  state_ = tr.next_state;
  ++t_;
  return {tr.reward, t_ >= mdp_.horizon};
}

void to_json(nlohmann::json& j, const TabularMdp& mdp) {
  j = nlohmann::json{{"n_states", mdp.n_states},
                     {"n_actions", mdp.n_actions},
                     {"transition", mdp.transition},
                     {"reward", mdp.reward},
                     {"start", mdp.start},
                     {"horizon", mdp.horizon}};
}

void from_json(const nlohmann::json& j, TabularMdp& mdp) {
  static const std::set<std::string> kKeys = {
      "n_states", "n_actions", "transition", "reward", "start", "horizon"};
  if (!j.is_object()) throw ConfigError("mdp: expected an object");
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("mdp: unknown key '" + key + "'");
  }
  j.at("n_states").get_to(mdp.n_states);
  j.at("n_actions").get_to(mdp.n_actions);
  j.at("transition").get_to(mdp.transition);
  j.at("reward").get_to(mdp.reward);
  j.at("start").get_to(mdp.start);
  j.at("horizon").get_to(mdp.horizon);
  mdp.Validate();
}

}  // namespace bots
