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

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <doctest.h>

#include "bots/errors.hpp"
#include "bots/experiment.hpp"

namespace bots {
namespace {

namespace fs = std::filesystem;

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("bots_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string Slurp(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::vector<std::string> Lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream ss(text);
  for (std::string line; std::getline(ss, line);) out.push_back(line);
  return out;
}

std::vector<std::string> Cells(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

ExperimentConfig SmallMdp2() {
  ExperimentConfig cfg;
  cfg.name = "small";
  cfg.environment = "mdp2";
  cfg.total_episodes = 14;
  cfg.mrt_episodes = 2;
  cfg.sobol_episodes = 4;
  cfg.rounds = 2;
  cfg.repetitions = 3;
  cfg.seed = 11;
  cfg.acquisition = {.n_mc = 64, .n_restarts = 2, .n_raw = 32, .max_evaluations = 100};
  cfg.gp_random_starts = 2;
  return cfg;
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("defaults") {
    const auto cfg = ExperimentFromJson(nlohmann::json::object());
    CHECK(cfg.total_episodes == 140);
    CHECK(cfg.rounds == 6);
    CHECK(cfg.method == Method::kBotsTurbo);
    CHECK(cfg.environment == "jitai");
  }
  SUBCASE("echo round-trips") {
    ExperimentConfig cfg = SmallMdp2();
    cfg.method = Method::kBotsGlobal;
    cfg.search_space = SearchSpace::kBetaPerActionVariance;
    cfg.prior_strategy = PriorStrategy::kUpdate;
    cfg.jitai.sigma = 0.7;
    cfg.feature_mode = FeatureMode::kOneHot;
    cfg.q_learning.lr = 0.3;
    cfg.seed = 0xffffffffffffull;
    const auto back = ExperimentFromJson(nlohmann::json::parse(ToJson(cfg).dump()));
    CHECK(back == cfg);
    CHECK(back.seed == cfg.seed);
  }
  SUBCASE("fail closed") {
    auto parse = [](const char* text) {
      return ExperimentFromJson(nlohmann::json::parse(text));
    };
    CHECK_THROWS_AS(parse(R"({"rounds": 7})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"method": "ppo"})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"environment": "jitai", "method": "q-learning"})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"prior": {"scale": -1}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"acquisition": {"n_mcc": 3}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"jitai": {"sigma": 0}})"), ConfigError);
    CHECK_THROWS_AS(parse(R"({"repetitions": "ten"})"), ConfigError);
    CHECK_THROWS_AS(parse(R"([1, 2])"), ConfigError);
    CHECK_NOTHROW(parse(R"({"environment": "mdp3", "method": "q-learning", "rounds": 7})"));
  }
  SUBCASE("file diagnostics name the line and field") {
    const auto dir = ScratchDir("diag");
    WriteText(dir / "a.json", "{\n  \"name\": \"x\",\n  \"prior\": {\n    \"scal\": 3\n  }\n}\n");
    try {
      LoadExperiment(dir / "a.json");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      const std::string msg = e.what();
      CHECK(msg.find("a.json:4:") != std::string::npos);
      CHECK(msg.find("prior.scal") != std::string::npos);
    }
    WriteText(dir / "b.json", "{\n  \"name\": \"x\",\n}\n");
    try {
      LoadExperiment(dir / "b.json");
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("b.json:3:") != std::string::npos);
    }
    CHECK_THROWS_AS(LoadExperiment(dir / "missing.json"), ConfigError);
  }
}

TEST_CASE("sweep expansion") {
  SweepConfig sweep;
  sweep.base = SmallMdp2();
  sweep.base.total_episodes = 140;
  sweep.base.mrt_episodes = 10;
  sweep.base.sobol_episodes = 10;
  for (int r : {2, 6, 12, 24, 30, 60, 120}) sweep.axes["rounds"].push_back(r);
  sweep.axes["method"] = {"bots-turbo", "ts-fixed"};
  CHECK(sweep.cells() == 14);
  const auto cells = sweep.Expand();
  REQUIRE(cells.size() == 14);
  std::set<std::string> names;
  for (const auto& c : cells) {
    names.insert(c.name);
    const auto schedule = MakeBotsConfig(c).schedule;
    CHECK(schedule.total() == 140);
    CHECK(schedule.batch_sizes.back() == 120 / c.rounds);
  }
  CHECK(names.size() == 14);

  const auto back = SweepFromJson(nlohmann::json::parse(ToJson(sweep).dump()));
  CHECK(back.cells() == 14);
  CHECK_THROWS_AS(SweepFromJson(nlohmann::json::parse(R"({"grid": {"seed": [1]}})")),
                  ConfigError);
  CHECK_THROWS_AS(SweepFromJson(nlohmann::json::parse(R"({"grid": {"rounds": [7]}})")),
                  ConfigError);
  CHECK_THROWS_AS(SweepFromJson(nlohmann::json::parse(R"({"grid": {"rounds": []}})")),
                  ConfigError);
}

TEST_CASE("aggregate statistics") {
  const auto agg = AggregateReturns({1.0, 2.0, 3.0, 6.0});
  CHECK(agg.repetitions == 4);
  CHECK(agg.mean_avg_return == 3.0);
  CHECK(agg.stderr_avg_return == doctest::Approx(std::sqrt(14.0 / 3.0) / 2.0));
  CHECK(AggregateReturns({5.0}).stderr_avg_return == 0.0);
}

TEST_CASE("run artifacts") {
  const auto out = ScratchDir("run");
  const ExperimentConfig cfg = SmallMdp2();
  Aggregate agg;
  const auto dir = RunExperiment(cfg, out, 1, &agg);
  CHECK(dir == out / "runs" / "small");
  for (int rep = 0; rep < 3; ++rep) {
    CHECK(fs::exists(dir / ("record_rep" + std::to_string(rep) + ".json")));
  }

  SUBCASE("summary has one row per round per repetition") {
    const auto lines = Lines(Slurp(dir / "summary.csv"));
    REQUIRE(lines.size() == 1 + 3 * 3);
    CHECK(lines[0].rfind("rep,round,batch_size,candidate_id,p0,return,best_so_far,tr_length", 0) == 0);
    const auto header = Cells(lines[0]);
    for (std::size_t i = 1; i < lines.size(); ++i) CHECK(Cells(lines[i]).size() == header.size());
  }
  SUBCASE("episode accounting reconciles with the schedule") {
    const auto lines = Lines(Slurp(dir / "episodes.csv"));
    CHECK(lines.size() == 1 + 3 * 14);
    int batch_total = 0;
    for (const auto& line : Lines(Slurp(dir / "summary.csv"))) {
      const auto c = Cells(line);
      if (c[0] == "0") batch_total += std::stoi(c[2]);
    }
    CHECK(batch_total + cfg.mrt_episodes == cfg.total_episodes);
  }
  SUBCASE("aggregate is mean and standard error of record averages") {
    std::vector<double> averages;
    for (int rep = 0; rep < 3; ++rep) {
      const auto j = nlohmann::json::parse(
          Slurp(dir / ("record_rep" + std::to_string(rep) + ".json")));
      averages.push_back(j.at("average_return").get<double>());
      CHECK(j.at("episodes").get<int>() == 14);
    }
    const auto expect = AggregateReturns(averages);
    CHECK(agg.mean_avg_return == expect.mean_avg_return);
    const auto lines = Lines(Slurp(dir / "aggregate.csv"));
    REQUIRE(lines.size() == 2);
    const auto c = Cells(lines[1]);
    CHECK(std::stod(c[7]) == doctest::Approx(expect.mean_avg_return).epsilon(1e-9));
    CHECK(std::stod(c[8]) == doctest::Approx(expect.stderr_avg_return).epsilon(1e-9));
  }
  SUBCASE("config echo re-parses to the same config") {
    CHECK(LoadExperiment(dir / "config.json") == cfg);
  }
  SUBCASE("rerun is byte-identical, with or without parallel repetitions") {
    const std::string first = Slurp(dir / "summary.csv");
    const std::string episodes = Slurp(dir / "episodes.csv");
    const auto again = RunExperiment(cfg, ScratchDir("run2"), 3);
    CHECK(Slurp(again / "summary.csv") == first);
    CHECK(Slurp(again / "episodes.csv") == episodes);
    CHECK(Slurp(again / "record_rep1.json") == Slurp(dir / "record_rep1.json"));
  }
}

TEST_CASE("q-learning uses the shared CSV schema") {
  ExperimentConfig cfg = SmallMdp2();
  cfg.name = "q";
  cfg.method = Method::kQLearning;
  cfg.total_episodes = 20;
  cfg.repetitions = 2;
  const auto dir = RunExperiment(cfg, ScratchDir("q"), 1);
  const auto lines = Lines(Slurp(dir / "summary.csv"));
  REQUIRE(lines.size() == 1 + 2 * 20);
  CHECK(lines[0] == SummaryHeader(0).substr(0, SummaryHeader(0).size() - 1));
  const auto header = Cells(lines[0]);
  for (std::size_t i = 1; i < lines.size(); ++i) REQUIRE(Cells(lines[i]).size() == header.size());
  CHECK(Lines(Slurp(dir / "aggregate.csv")).size() == 2);
}

TEST_CASE("sweep and plot data") {
  const auto out = ScratchDir("sweep");
  SweepConfig sweep;
  sweep.base = SmallMdp2();
  sweep.base.name = "grid";
  sweep.base.repetitions = 2;
  sweep.base.mrt_episodes = 2;
  sweep.base.sobol_episodes = 2;
  sweep.axes["rounds"] = {10, 2, 5};
  sweep.axes["method"] = {"ts-fixed", "bots-turbo"};
  const auto dir = RunSweep(sweep, out, 1);
  const auto rows = Lines(Slurp(dir / "sweep.csv"));
  CHECK(rows.size() == 1 + 6);

  std::ostringstream warnings;
  const auto plot = WritePlotData(dir, warnings);
  CHECK(warnings.str().empty());
  const auto lines = Lines(Slurp(plot));
  REQUIRE(lines.size() == 7);
  CHECK(lines[0] == "method,search_space,rounds,batch,mean_avg_return,stderr");
  const char* expected_order[] = {"bots-turbo,beta,2,", "bots-turbo,beta,5,", "bots-turbo,beta,10,",
                                  "ts-fixed,beta,2,", "ts-fixed,beta,5,", "ts-fixed,beta,10,"};
  for (int i = 0; i < 6; ++i) CHECK(lines[i + 1].rfind(expected_order[i], 0) == 0);

  SUBCASE("degenerate grid equals a plain run") {
    SweepConfig one;
    one.base = SmallMdp2();
    one.base.name = "one";
    one.axes["rounds"] = {2};
    const auto sdir = RunSweep(one, ScratchDir("one"), 1);
    ExperimentConfig plain = SmallMdp2();
    plain.name = "rounds=2";
    const auto rdir = RunExperiment(plain, ScratchDir("plain"), 1);
    CHECK(Slurp(sdir / "cells" / "rounds=2" / "summary.csv") == Slurp(rdir / "summary.csv"));
  }
  SUBCASE("missing cells are reported and skipped") {
    fs::remove_all(dir / "cells" / "method=ts-fixed__rounds=5");
    std::ostringstream w;
    const auto lines2 = Lines(Slurp(WritePlotData(dir, w)));
    CHECK(lines2.size() == 6);
    CHECK(w.str().find("method=ts-fixed__rounds=5") != std::string::npos);
  }
}

}  // namespace bots
