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

#include "bots/bots_driver.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "bots/errors.hpp"
#include "bots/parallel.hpp"
#include "bots/random.hpp"

namespace bots {
namespace {

BeliefSet BasePrior(const BotsConfig& cfg, int num_actions, int dim) {
  return BeliefSet(num_actions,
                   GaussianLinearBelief::Isotropic(dim, cfg.prior_mean,
                                                   cfg.prior_scale,
                                                   cfg.prior_sigma_y2));
}

std::vector<double> ToStd(const VectorXd& v) {
  return {v.data(), v.data() + v.size()};
}

nlohmann::json EpisodeJson(const EpisodeRecord& e) {
  return {{"params", ToStd(e.params)},
          {"return", e.total_return},
          {"length", e.length},
          {"terminated_early", e.terminated_early}};
}

Eigen::Index ArgMax(const std::vector<double>& v) {
  return std::distance(v.begin(), std::max_element(v.begin(), v.end()));
}

}  // namespace

SearchSpace ParseSearchSpace(std::string_view name) {
  if (name == "beta") return SearchSpace::kBeta;
  if (name == "beta+shared-variance") return SearchSpace::kBetaSharedVariance;
  if (name == "beta+per-action-variance") {
    return SearchSpace::kBetaPerActionVariance;
  }
  throw ConfigError("unknown search space '" + std::string(name) + "'");
}

std::string_view SearchSpaceName(SearchSpace space) {
  switch (space) {
    case SearchSpace::kBeta: return "beta";
    case SearchSpace::kBetaSharedVariance: return "beta+shared-variance";
    case SearchSpace::kBetaPerActionVariance: return "beta+per-action-variance";
  }
  return "beta";
}

BoMode ParseBoMode(std::string_view name) {
  if (name == "global") return BoMode::kGlobal;
  if (name == "turbo") return BoMode::kTurbo;
  throw ConfigError("unknown BO mode '" + std::string(name) + "'");
}

std::string_view BoModeName(BoMode mode) {
  return mode == BoMode::kGlobal ? "global" : "turbo";
}

PriorStrategy ParsePriorStrategy(std::string_view name) {
  if (name == "fixed") return PriorStrategy::kFixed;
  if (name == "update") return PriorStrategy::kUpdate;
  throw ConfigError("unknown prior strategy '" + std::string(name) + "'");
}

std::string_view PriorStrategyName(PriorStrategy strategy) {
  return strategy == PriorStrategy::kFixed ? "fixed" : "update";
}

int BudgetSchedule::total() const {
  return mrt_episodes +
         std::accumulate(batch_sizes.begin(), batch_sizes.end(), 0);
}

BudgetSchedule MakeSchedule(int total, int mrt, int sobol, int rounds) {
  if (mrt < 0 || sobol < 1 || rounds < 0) {
    throw ConfigError("schedule needs mrt >= 0, sobol >= 1 and rounds >= 0");
  }
  const int remaining = total - mrt - sobol;
  if (remaining < 0) {
    throw ConfigError("budget " + std::to_string(total) +
                      " is smaller than mrt + sobol");
  }
  if (rounds == 0 ? remaining != 0 : remaining % rounds != 0 ||
                                         remaining / rounds < 1) {
    throw ConfigError("remaining budget " + std::to_string(remaining) +
                      " does not split evenly into " + std::to_string(rounds) +
                      " rounds");
  }
  BudgetSchedule s;
  s.mrt_episodes = mrt;
  s.batch_sizes.push_back(sobol);
  for (int i = 0; i < rounds; ++i) s.batch_sizes.push_back(remaining / rounds);
  return s;
}

int SearchDimension(SearchSpace space, int num_actions) {
  const int biases = num_actions - 1;
  switch (space) {
    case SearchSpace::kBeta: return biases;
    case SearchSpace::kBetaSharedVariance: return biases + 1;
    case SearchSpace::kBetaPerActionVariance: return biases + num_actions;
  }
  return biases;
}

ParamBounds SearchBounds(const BotsConfig& cfg, int num_actions) {
  const int dim = SearchDimension(cfg.search_space, num_actions);
  const int biases = num_actions - 1;
  ParamBounds b{VectorXd(dim), VectorXd(dim)};
  for (int i = 0; i < dim; ++i) {
    const bool is_bias = i < biases;
    b.lower(i) = is_bias ? cfg.beta_lower : cfg.variance_lower;
    b.upper(i) = is_bias ? cfg.beta_upper : cfg.variance_upper;
  }
  b.Validate();
  return b;
}

DecodedCandidate DecodeCandidate(SearchSpace space, const VectorXd& v,
                                 int num_actions, double default_sigma_y2) {
  const int biases = num_actions - 1;
  if (v.size() != SearchDimension(space, num_actions)) {
    throw InvalidInput("candidate has " + std::to_string(v.size()) +
                       " entries, search space expects " +
                       std::to_string(SearchDimension(space, num_actions)));
  }
  DecodedCandidate out;
  out.beta = VectorXd::Zero(num_actions);
  out.beta.tail(biases) = v.head(biases);
  switch (space) {
    case SearchSpace::kBeta:
      out.sigma_y2 = VectorXd::Constant(num_actions, default_sigma_y2);
      break;
    case SearchSpace::kBetaSharedVariance:
      out.sigma_y2 = VectorXd::Constant(num_actions, v(biases));
      break;
    case SearchSpace::kBetaPerActionVariance:
      out.sigma_y2 = v.tail(num_actions);
      break;
  }
  return out;
}

BeliefSet ApplyPriorStrategy(PriorStrategy strategy,
                             const BeliefSet& base_beliefs,
                             const BeliefSet& mrt_beliefs,
                             std::span<const EpisodeTrace> all_traces) {
  if (strategy == PriorStrategy::kFixed) return mrt_beliefs;
  return FitBeliefs(base_beliefs, all_traces);
}

int RunRecord::episodes() const {
  int n = static_cast<int>(mrt.size());
  for (const auto& r : rounds) n += static_cast<int>(r.episodes.size());
  return n;
}

std::vector<double> RunRecord::Returns() const {
  std::vector<double> out;
  for (const auto& e : mrt) out.push_back(e.total_return);
  for (const auto& r : rounds) {
    for (const auto& e : r.episodes) out.push_back(e.total_return);
  }
  return out;
}

RunRecord RunBots(const BotsConfig& cfg, const EnvFactory& env_factory,
                  int repetition) {
  const auto probe = env_factory();
  const int num_actions = probe->num_actions();
  const int feature_dim = probe->feature_dim();
  const ParamBounds bounds = SearchBounds(cfg, num_actions);
  const int dim = bounds.dim();
  if (cfg.fixed_candidate && cfg.fixed_candidate->size() != dim) {
    throw ConfigError("fixed candidate does not match the search dimension");
  }
  const auto rep = static_cast<std::uint64_t>(repetition);

  RunRecord record;
  record.repetition = repetition;
  record.base_seed = cfg.base_seed;

  const BeliefSet base = BasePrior(cfg, num_actions, feature_dim);
  std::vector<EpisodeTrace> pooled;

  // Micro-randomized trial.
  const int n_mrt = cfg.schedule.mrt_episodes;
  std::vector<EpisodeTrace> mrt_traces(n_mrt);
  ParallelFor(n_mrt, cfg.jobs, [&](int b) {
    try {
      Rng rng(EpisodeSeed(cfg.base_seed, rep, 0, b));
      auto env = env_factory();
      mrt_traces[b] = RunRandomEpisode(*env, rng);
    } catch (const std::exception& e) {
      throw RunError(-1, b, e.what());
    }
  });
  for (auto& t : mrt_traces) {
    record.mrt.push_back({VectorXd(), t.total_return, t.length(),
                          t.terminated_early});
    pooled.push_back(std::move(t));
  }
  record.mrt_beliefs = n_mrt > 0 ? FitBeliefs(base, pooled) : base;
  BeliefSet beliefs = record.mrt_beliefs;

  std::vector<VectorXd> xs;
  std::vector<double> ys;
  std::optional<TrustRegionState> tr;

  for (int round = 0; round <= cfg.schedule.rounds(); ++round) {
    const int q = cfg.schedule.batch_sizes[round];
    const auto round_seed = RoundSeed(cfg.base_seed, rep, round);
    RoundRecord rr;
    rr.round = round;

    MatrixXd candidates(q, dim);
    if (cfg.fixed_candidate) {
      for (int b = 0; b < q; ++b) candidates.row(b) = cfg.fixed_candidate->transpose();
    } else if (round == 0) {
      candidates = SobolBatch(bounds, q, round_seed);
    } else {
      try {
        MatrixXd x_raw(static_cast<Eigen::Index>(xs.size()), dim);
        for (std::size_t i = 0; i < xs.size(); ++i) {
          x_raw.row(static_cast<Eigen::Index>(i)) = xs[i].transpose();
        }
        const VectorXd y_raw =
            Eigen::Map<const VectorXd>(ys.data(), static_cast<Eigen::Index>(ys.size()));
        GpFitOptions fit_opts;
        fit_opts.n_random_starts = cfg.gp_random_starts;
        fit_opts.seed = round_seed;
        const GpSurrogate model = FitGp(x_raw, y_raw, bounds, fit_opts);
        rr.gp = model.hyper();

        const SearchBox box = cfg.bo_mode == BoMode::kTurbo && tr
                                  ? TurboBounds(*tr, model.hyper().lengthscale)
                                  : SearchBox::UnitCube(dim);
        QeiOptions acq = cfg.acquisition;
        acq.seed = round_seed ^ 0xacacULL;
        const QeiResult res =
            OptimizeQei(model, box, q, model.y().maxCoeff(), acq);
        candidates = bounds.FromUnit(res.points);
        rr.acquisition_value = res.value;
        rr.acquisition_restarts = res.restarts;
        if (round == cfg.schedule.rounds()) record.final_surrogate = ToJson(model);
      } catch (const std::exception& e) {
        throw RunError(round, -1, e.what());
      }
    }

    std::vector<EpisodeTrace> traces(q);
    ParallelFor(q, cfg.jobs, [&](int b) {
      try {
        const VectorXd v = candidates.row(b).transpose();
        const DecodedCandidate dc = DecodeCandidate(
            cfg.search_space, v, num_actions, cfg.prior_sigma_y2);
        XtsParams params;
        params.beta = dc.beta;
        params.beliefs = beliefs;
        for (int a = 0; a < num_actions; ++a) {
          params.beliefs[a].sigma_y2 = dc.sigma_y2(a);
        }
        Rng rng(EpisodeSeed(cfg.base_seed, rep, round + 1, b));
        auto env = env_factory();
        traces[b] = RunEpisode(*env, params, rng);
      } catch (const std::exception& e) {
        throw RunError(round, b, e.what());
      }
    });

    const double incumbent =
        ys.empty() ? -std::numeric_limits<double>::infinity()
                   : *std::max_element(ys.begin(), ys.end());
    double batch_best = -std::numeric_limits<double>::infinity();
    for (int b = 0; b < q; ++b) {
      const VectorXd v = candidates.row(b).transpose();
      rr.episodes.push_back({v, traces[b].total_return, traces[b].length(),
                             traces[b].terminated_early});
      xs.push_back(v);
      ys.push_back(traces[b].total_return);
      batch_best = std::max(batch_best, traces[b].total_return);
      pooled.push_back(std::move(traces[b]));
    }
    rr.best_so_far = *std::max_element(ys.begin(), ys.end());

    if (cfg.bo_mode == BoMode::kTurbo && !cfg.fixed_candidate) {
      MatrixXd best_raw = xs[ArgMax(ys)].transpose();
      VectorXd center = bounds.ToUnit(best_raw).row(0).transpose();
      if (!tr) {
        tr = TrustRegionState::Initial(center);
      } else {
        tr = TurboUpdate(*tr, batch_best, incumbent);
        tr->center = center;
      }
      rr.trust_region = tr;
    }

    if (cfg.prior_strategy == PriorStrategy::kUpdate) {
      beliefs = ApplyPriorStrategy(cfg.prior_strategy, base,
                                   record.mrt_beliefs, pooled);
    }
    record.rounds.push_back(std::move(rr));
  }
  record.final_beliefs = beliefs;

  const auto returns = record.Returns();
  record.average_return =
      returns.empty() ? 0.0
                      : std::accumulate(returns.begin(), returns.end(), 0.0) /
                            static_cast<double>(returns.size());
  return record;
}

nlohmann::json ToJson(const RunRecord& record) {
  nlohmann::json j;
  j["repetition"] = record.repetition;
  j["base_seed"] = record.base_seed;
  j["average_return"] = record.average_return;
  j["episodes"] = record.episodes();
  auto& mrt = j["mrt"] = nlohmann::json::array();
  for (const auto& e : record.mrt) mrt.push_back(EpisodeJson(e));
  auto& rounds = j["rounds"] = nlohmann::json::array();
  for (const auto& r : record.rounds) {
    nlohmann::json rj;
    rj["round"] = r.round;
    rj["batch_size"] = r.episodes.size();
    rj["best_so_far"] = r.best_so_far;
    rj["acquisition_value"] = r.acquisition_value;
    rj["acquisition_restarts"] = r.acquisition_restarts;
    auto& eps = rj["episodes"] = nlohmann::json::array();
    for (const auto& e : r.episodes) eps.push_back(EpisodeJson(e));
    if (r.gp) {
      rj["gp"] = {{"lengthscale", ToStd(r.gp->lengthscale)},
                  {"outputscale", r.gp->outputscale},
                  {"noise_sd", r.gp->noise_sd}};
    }
    if (r.trust_region) rj["trust_region"] = ToJson(*r.trust_region);
    rounds.push_back(std::move(rj));
  }
  auto beliefs_json = [](const BeliefSet& bs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& b : bs) arr.push_back(ToJson(b));
    return arr;
  };
  j["mrt_beliefs"] = beliefs_json(record.mrt_beliefs);
  j["final_beliefs"] = beliefs_json(record.final_beliefs);
  if (record.final_surrogate) j["final_surrogate"] = *record.final_surrogate;
  return j;
}

}  // namespace bots
