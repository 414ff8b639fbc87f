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

// Command-line entry point: run, sweep and plotdata.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid configuration or usage.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "bots/errors.hpp"
#include "bots/experiment.hpp"

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kConfigFailure = 2;

struct Overrides {
  int jobs = 1;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
};

void Apply(const Overrides& o, bots::ExperimentConfig& cfg) {
  if (o.seed) cfg.seed = *o.seed;
  if (o.out) cfg.output_dir = *o.out;
}

int CmdRun(const std::string& path, const Overrides& o) {
  auto cfg = bots::LoadExperiment(path);
  Apply(o, cfg);
  bots::Aggregate agg;
  const auto dir = bots::RunExperiment(cfg, cfg.output_dir, o.jobs, &agg);
  std::cout << dir.string() << ": mean average return " << agg.mean_avg_return
            << " +- " << agg.stderr_avg_return << " over " << agg.repetitions
            << " repetitions\n";
  return 0;
}

int CmdSweep(const std::string& path, const Overrides& o) {
  auto cfg = bots::LoadSweep(path);
  Apply(o, cfg.base);
  const auto dir = bots::RunSweep(cfg, cfg.base.output_dir, o.jobs);
  std::cout << (dir / "sweep.csv").string() << ": " << cfg.cells() << " cells\n";
  return 0;
}

int CmdPlotData(const std::string& dir) {
  const auto out = bots::WritePlotData(dir, std::cerr);
  std::cout << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch Bayesian optimization of Thompson sampling action biases"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--jobs", o.jobs, "Concurrent repetitions")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Override the base seed");
  app.add_option("--out", o.out, "Override the output directory");

  std::string config, sweep_dir;
  auto* run = app.add_subcommand("run", "Run one experiment config");
  run->add_option("config", config, "Experiment config (JSON)")->required();
  auto* sweep = app.add_subcommand("sweep", "Run every cell of a sweep config");
  sweep->add_option("config", config, "Sweep config (JSON)")->required();
  auto* plot = app.add_subcommand("plotdata", "Emit long-format plot data from a sweep");
  plot->add_option("dir", sweep_dir, "Sweep directory")->required();
  for (auto* sub : {run, sweep, plot}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigFailure;
  }

  try {
    if (*run) return CmdRun(config, o);
    if (*sweep) return CmdSweep(config, o);
    return CmdPlotData(sweep_dir);
  } catch (const bots::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeFailure;
  }
}
