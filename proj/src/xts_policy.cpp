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

#include "bots/xts_policy.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include "bots/errors.hpp"

namespace bots {

void XtsParams::Validate() const {
  if (beta.size() == 0) throw InvalidInput("beta must not be empty");
  if (static_cast<std::size_t>(beta.size()) != beliefs.size()) {
    throw InvalidInput("beta and beliefs must cover the same actions");
  }
  if (beta(0) != 0.0) throw InvalidInput("beta[0] is pinned to zero");
  if (!beta.allFinite()) throw InvalidInput("beta must be finite");
  ValidateBeliefSet(beliefs);
}

int SelectAction(const VectorXd& beta, const BeliefSet& beliefs,
                 const VectorXd& features, Rng& rng) {
  if (static_cast<std::size_t>(beta.size()) != beliefs.size()) {
    throw InvalidInput("beta and beliefs must cover the same actions");
  }
  int best_action = 0;
  double best_utility = -std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < beliefs.size(); ++a) {
    if (features.size() != beliefs[a].mu.size()) {
      throw InvalidInput("feature dimension does not match beliefs");
    }
    const VectorXd theta = SampleWeights(beliefs[a], rng);
    const double utility = theta.dot(features) + beta(static_cast<Eigen::Index>(a));
    if (utility > best_utility) {
      best_utility = utility;
      best_action = static_cast<int>(a);
    }
  }
  return best_action;
}

EpisodeTrace RunEpisode(Environment& env, const XtsParams& params, Rng& rng) {
  params.Validate();
  if (params.num_actions() != env.num_actions()) {
    throw InvalidInput("policy and environment disagree on action count");
  }
  EpisodeTrace trace;
  trace.final_beliefs = params.beliefs;
  BeliefSet& beliefs = trace.final_beliefs;

  env.Reset(rng);
  const int horizon = env.horizon();
  for (int t = 0; t < horizon; ++t) {
    try {
      VectorXd s = env.Observe();
      const int action = SelectAction(params.beta, beliefs, s, rng);
      const StepResult step = env.Step(action, rng);
      if (params.update_within_episode) {
        beliefs[action] = PosteriorUpdate(beliefs[action], s, step.reward);
      }
      trace.total_return += step.reward;
      trace.steps.push_back({std::move(s), action, step.reward});
      if (step.done) {
        trace.terminated_early = t + 1 < horizon;
        break;
      }
    } catch (const EpisodeError&) {
      throw;
    } catch (const std::exception& e) {
      throw EpisodeError(t, e.what());
    }
  }
  return trace;
}

EpisodeTrace RunRandomEpisode(Environment& env, Rng& rng) {
  EpisodeTrace trace;
  std::uniform_int_distribution<int> pick(0, env.num_actions() - 1);
  env.Reset(rng);
  const int horizon = env.horizon();
  for (int t = 0; t < horizon; ++t) {
    try {
      VectorXd s = env.Observe();
      const int action = pick(rng);
      const StepResult step = env.Step(action, rng);
      trace.total_return += step.reward;
      trace.steps.push_back({std::move(s), action, step.reward});
      if (step.done) {
        trace.terminated_early = t + 1 < horizon;
        break;
      }
    } catch (const std::exception& e) {
      throw EpisodeError(t, e.what());
    }
  }
  return trace;
}

BeliefSet FitBeliefs(const BeliefSet& base_prior,
                     std::span<const EpisodeTrace> traces) {
  ValidateBeliefSet(base_prior);
  std::vector<std::vector<Observation>> per_action(base_prior.size());
  for (const auto& trace : traces) {
    for (const auto& step : trace.steps) {
      if (step.action < 0 ||
          static_cast<std::size_t>(step.action) >= base_prior.size()) {
        throw InvalidInput("trace action out of range for belief set");
      }
      per_action[step.action].push_back({step.features, step.reward});
    }
  }
  BeliefSet out;
  out.reserve(base_prior.size());
  for (std::size_t a = 0; a < base_prior.size(); ++a) {
    out.push_back(BatchFit(base_prior[a], per_action[a]));
  }
  return out;
}

BeliefSet RunMrt(const EnvFactory& env_factory, int n_episodes,
                 const BeliefSet& base_prior, Rng& rng) {
  if (n_episodes < 1) throw InvalidInput("MRT needs at least one episode");
  std::vector<EpisodeTrace> traces;
  traces.reserve(n_episodes);
  for (int i = 0; i < n_episodes; ++i) {
    auto env = env_factory();
    traces.push_back(RunRandomEpisode(*env, rng));
  }
  return FitBeliefs(base_prior, traces);
}

void WriteTraceJsonl(std::ostream& os, const EpisodeTrace& trace) {
  for (std::size_t t = 0; t < trace.steps.size(); ++t) {
    const auto& step = trace.steps[t];
    nlohmann::json line{
        {"t", t},
        {"features", std::vector<double>(step.features.data(),
                                         step.features.data() +
                                             step.features.size())},
        {"action", step.action},
        {"reward", step.reward}};
    os << line.dump() << '\n';
  }
}

EpisodeTrace ReadTraceJsonl(std::istream& is) {
  EpisodeTrace trace;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto f = j.at("features").get<std::vector<double>>();
    EpisodeStep step;
    step.features = Eigen::Map<const VectorXd>(f.data(),
                                               static_cast<Eigen::Index>(f.size()));
    step.action = j.at("action").get<int>();
    step.reward = j.at("reward").get<double>();
    trace.total_return += step.reward;
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

}  // namespace bots
