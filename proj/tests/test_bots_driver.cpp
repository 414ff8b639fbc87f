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

#include <memory>

#include <doctest.h>

#include "bots/baselines.hpp"
#include "bots/bots_driver.hpp"
#include "bots/errors.hpp"
#include "bots/jitai.hpp"
#include "bots/tabular_mdp.hpp"

namespace bots {
namespace {

EnvFactory MdpFactory(TabularMdp mdp) {
  return [mdp] { return std::make_unique<TabularEnvironment>(mdp); };
}

EnvFactory JitaiFactory(JitaiConfig cfg = {}) {
  return [cfg] { return std::make_unique<JitaiEnvironment>(cfg); };
}

BotsConfig SmallConfig() {
  BotsConfig cfg;
  cfg.schedule = MakeSchedule(14, 2, 4, 2);
  cfg.acquisition = {.n_mc = 64, .n_restarts = 2, .n_raw = 32, .max_evaluations = 100};
  cfg.gp_random_starts = 2;
  cfg.base_seed = 1234;
  return cfg;
}

bool SameBeliefs(const BeliefSet& a, const BeliefSet& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].mu != b[i].mu || a[i].sigma != b[i].sigma ||
        a[i].sigma_y2 != b[i].sigma_y2) {
      return false;
    }
  }
  return true;
}

VectorXd Vec(std::initializer_list<double> v) {
  VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST_CASE("make_schedule") {
  SUBCASE("six rounds of twenty") {
    const auto s = MakeSchedule(140, 10, 10, 6);
    CHECK(s.mrt_episodes == 10);
    CHECK(s.batch_sizes == std::vector<int>{10, 20, 20, 20, 20, 20, 20});
    CHECK(s.rounds() == 6);
  }
  SUBCASE("unit batches") {
    const auto s = MakeSchedule(140, 10, 10, 120);
    REQUIRE(s.batch_sizes.size() == 121);
    CHECK(s.batch_sizes[0] == 10);
    for (int i = 1; i <= 120; ++i) CHECK(s.batch_sizes[i] == 1);
  }
  SUBCASE("small split") {
    CHECK(MakeSchedule(30, 10, 10, 2).batch_sizes == std::vector<int>{10, 5, 5});
  }
  SUBCASE("property: every studied round count conserves the budget") {
    const std::pair<int, int> grid[] = {{2, 60}, {6, 20}, {12, 10}, {24, 5},
                                        {30, 4}, {60, 2}, {120, 1}};
    for (auto [rounds, batch] : grid) {
      const auto s = MakeSchedule(140, 10, 10, rounds);
      CHECK(s.total() == 140);
      CHECK(s.batch_sizes.back() == batch);
    }
  }
  SUBCASE("invalid splits") {
    CHECK_THROWS_AS(MakeSchedule(140, 10, 10, 7), ConfigError);
    CHECK_THROWS_AS(MakeSchedule(10, 10, 10, 1), ConfigError);
    CHECK_THROWS_AS(MakeSchedule(30, 10, 10, 0), ConfigError);
    CHECK(MakeSchedule(20, 10, 10, 0).batch_sizes == std::vector<int>{10});
  }
}

TEST_CASE("candidate decoding") {
  SUBCASE("beta only") {
    const auto dc = DecodeCandidate(SearchSpace::kBeta, Vec({-5, -10, -2}), 4, 625.0);
    CHECK(dc.beta == Vec({0, -5, -10, -2}));
    CHECK(dc.sigma_y2 == VectorXd::Constant(4, 625.0));
  }
  SUBCASE("shared variance") {
    const auto dc =
        DecodeCandidate(SearchSpace::kBetaSharedVariance, Vec({-1, -2, -3, 40}), 4, 625.0);
    CHECK(dc.beta == Vec({0, -1, -2, -3}));
    CHECK(dc.sigma_y2 == VectorXd::Constant(4, 40.0));
  }
  SUBCASE("per-action variance") {
    const auto dc = DecodeCandidate(SearchSpace::kBetaPerActionVariance,
                                    Vec({-1, -2, -3, 4, 5, 6, 7}), 4, 625.0);
    CHECK(dc.beta == Vec({0, -1, -2, -3}));
    CHECK(dc.sigma_y2 == Vec({4, 5, 6, 7}));
  }
  SUBCASE("dimensions and bounds") {
    CHECK(SearchDimension(SearchSpace::kBeta, 4) == 3);
    CHECK(SearchDimension(SearchSpace::kBetaSharedVariance, 4) == 4);
    CHECK(SearchDimension(SearchSpace::kBetaPerActionVariance, 4) == 7);
    BotsConfig cfg;
    cfg.search_space = SearchSpace::kBetaSharedVariance;
    const auto b = SearchBounds(cfg, 4);
    CHECK(b.lower == Vec({-100, -100, -100, 0.1}));
    CHECK(b.upper == Vec({0, 0, 0, 2500}));
    CHECK_THROWS_AS(DecodeCandidate(SearchSpace::kBeta, Vec({1, 2}), 4, 1.0), InvalidInput);
  }
  SUBCASE("names") {
    CHECK(ParseSearchSpace("beta+per-action-variance") == SearchSpace::kBetaPerActionVariance);
    CHECK(ParseBoMode("global") == BoMode::kGlobal);
    CHECK(ParsePriorStrategy("update") == PriorStrategy::kUpdate);
    CHECK_THROWS_AS(ParseBoMode("local"), ConfigError);
    CHECK(SearchSpaceName(SearchSpace::kBetaSharedVariance) == "beta+shared-variance");
  }
}

TEST_CASE("prior strategies") {
  const auto base = BeliefSet(2, GaussianLinearBelief::Isotropic(3, 0.0, 100.0, 625.0));
  TabularEnvironment env(Mdp1());
  std::vector<EpisodeTrace> mrt;
  for (int i = 0; i < 3; ++i) {
    Rng rng(i);
    mrt.push_back(RunRandomEpisode(env, rng));
  }
  const BeliefSet mrt_beliefs = FitBeliefs(base, mrt);

  std::vector<EpisodeTrace> more = mrt;
  EpisodeTrace extra;
  const VectorXd s = Vec({1, 1, 0});
  extra.steps.push_back({s, 0, 4.0});
  extra.steps.push_back({s, 1, -2.0});
  more.push_back(extra);

  CHECK(SameBeliefs(ApplyPriorStrategy(PriorStrategy::kFixed, base, mrt_beliefs, more),
                    mrt_beliefs));
  CHECK(SameBeliefs(ApplyPriorStrategy(PriorStrategy::kUpdate, base, mrt_beliefs, mrt),
                    mrt_beliefs));
  const auto updated = ApplyPriorStrategy(PriorStrategy::kUpdate, base, mrt_beliefs, more);
  const auto a0 = PosteriorUpdate(mrt_beliefs[0], s, 4.0);
  const auto a1 = PosteriorUpdate(mrt_beliefs[1], s, -2.0);
  CHECK((updated[0].mu - a0.mu).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((updated[0].sigma - a0.sigma).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((updated[1].mu - a1.mu).cwiseAbs().maxCoeff() < 1e-8);
  CHECK((updated[1].sigma - a1.sigma).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("run_bots structure and budget conservation") {
  for (auto mode : {BoMode::kGlobal, BoMode::kTurbo}) {
    for (auto space : {SearchSpace::kBeta, SearchSpace::kBetaSharedVariance,
                       SearchSpace::kBetaPerActionVariance}) {
      BotsConfig cfg = SmallConfig();
      cfg.bo_mode = mode;
      cfg.search_space = space;
      const auto rec = RunBots(cfg, MdpFactory(Mdp2()), 0);
      CHECK(rec.episodes() == 14);
      CHECK(rec.mrt.size() == 2);
      REQUIRE(rec.rounds.size() == 3);
      const auto bounds = SearchBounds(cfg, 2);
      for (std::size_t r = 0; r < rec.rounds.size(); ++r) {
        const auto& rr = rec.rounds[r];
        CHECK(static_cast<int>(rr.episodes.size()) == cfg.schedule.batch_sizes[r]);
        CHECK(rr.gp.has_value() == (r > 0));
        CHECK(rr.trust_region.has_value() == (mode == BoMode::kTurbo));
        for (const auto& e : rr.episodes) {
          REQUIRE(e.params.size() == bounds.dim());
          CHECK(((e.params - bounds.lower).array() >= -1e-9).all());
          CHECK(((bounds.upper - e.params).array() >= -1e-9).all());
          CHECK(e.length == 100);
        }
      }
      double sum = 0.0;
      for (double r : rec.Returns()) sum += r;
      CHECK(rec.average_return == doctest::Approx(sum / 14.0));
      CHECK(rec.final_surrogate.has_value());
    }
  }
}

TEST_CASE("best_so_far is the running maximum of round returns") {
  const auto rec = RunBots(SmallConfig(), MdpFactory(Mdp3()), 1);
  double best = -1e300;
  for (const auto& rr : rec.rounds) {
    for (const auto& e : rr.episodes) best = std::max(best, e.total_return);
    CHECK(rr.best_so_far == best);
  }
}

TEST_CASE("replay determinism") {
  BotsConfig cfg = SmallConfig();
  cfg.prior_strategy = PriorStrategy::kUpdate;
  const auto a = RunBots(cfg, JitaiFactory(), 3);
  const auto b = RunBots(cfg, JitaiFactory(), 3);
  CHECK(ToJson(a).dump() == ToJson(b).dump());
  SUBCASE("parallel episodes give the same record") {
    cfg.jobs = 4;
    CHECK(ToJson(RunBots(cfg, JitaiFactory(), 3)).dump() == ToJson(a).dump());
  }
  SUBCASE("repetitions differ") {
    CHECK(ToJson(RunBots(cfg, JitaiFactory(), 4)).dump() != ToJson(a).dump());
  }
}

TEST_CASE("beta = 0 candidates replay the Thompson sampling baseline") {
  BotsConfig cfg = SmallConfig();
  cfg.schedule = MakeSchedule(16, 4, 4, 2);
  const auto env_factory = JitaiFactory();
  const auto ts = RunTsBaseline(cfg, env_factory, 2);
  REQUIRE(ts.episodes() == 16);

  // Seed-matched replay: MRT with uniform actions, then zero-bias xTS with
  // the MRT-fitted prior under the documented per-episode seeds.
  const BeliefSet base(4, GaussianLinearBelief::Isotropic(2, 0.0, 100.0, 625.0));
  std::vector<EpisodeTrace> mrt;
  for (int b = 0; b < 4; ++b) {
    Rng rng(EpisodeSeed(cfg.base_seed, 2, 0, b));
    auto env = env_factory();
    mrt.push_back(RunRandomEpisode(*env, rng));
    CHECK(ts.mrt[b].total_return == mrt.back().total_return);
  }
  XtsParams params;
  params.beta = VectorXd::Zero(4);
  params.beliefs = FitBeliefs(base, mrt);
  CHECK(SameBeliefs(ts.mrt_beliefs, params.beliefs));
  for (int round = 0; round < 3; ++round) {
    for (int b = 0; b < 4; ++b) {
      Rng rng(EpisodeSeed(cfg.base_seed, 2, round + 1, b));
      auto env = env_factory();
      const auto trace = RunEpisode(*env, params, rng);
      CHECK(ts.rounds[round].episodes[b].total_return == trace.total_return);
      CHECK(ts.rounds[round].episodes[b].params == VectorXd::Zero(3));
    }
  }
  CHECK_FALSE(ts.rounds[1].gp.has_value());
}

TEST_CASE("failures carry round and candidate context") {
  class Broken final : public Environment {
   public:
    void Reset(Rng&) override { t_ = 0; }
    VectorXd Observe() const override { return VectorXd::Ones(1); }
    StepResult Step(int, Rng&) override {
      if (++t_ == 5) throw std::runtime_error("device lost");
      return {1.0, false};
    }
    int num_actions() const override { return 2; }
    int feature_dim() const override { return 1; }
    int horizon() const override { return 200; }

   private:
    int t_ = 0;
  };
  BotsConfig cfg = SmallConfig();
  cfg.schedule = MakeSchedule(4, 0, 2, 2);
  try {
    RunBots(cfg, [] { return std::make_unique<Broken>(); }, 0);
    FAIL("expected a RunError");
  } catch (const RunError& e) {
    CHECK(e.round() == 0);
    CHECK(e.candidate() >= 0);
    CHECK(std::string(e.what()).find("device lost") != std::string::npos);
  }
  cfg.schedule = MakeSchedule(4, 2, 2, 0);
  try {
    RunBots(cfg, [] { return std::make_unique<Broken>(); }, 0);
    FAIL("expected a RunError");
  } catch (const RunError& e) {
    CHECK(e.round() == -1);
  }
}

}  // namespace bots
