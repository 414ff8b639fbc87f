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

#include "bots/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <numeric>
#include <set>
#include <sstream>
#include <tuple>

#include "bots/errors.hpp"
#include "bots/parallel.hpp"
#include "bots/random.hpp"
#include "bots/tabular_mdp.hpp"

namespace bots {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ConfigError tied to a dotted field path, so the loader can find its line.
class FieldError : public ConfigError {
 public:
  FieldError(std::string field, const std::string& what)
      : ConfigError("field '" + field + "': " + what), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

std::string Join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

class Reader {
 public:
  Reader(const json& j, std::string prefix, std::set<std::string> keys)
      : j_(j), prefix_(std::move(prefix)) {
    if (!j_.is_object()) throw FieldError(prefix_.empty() ? "<root>" : prefix_, "expected an object");
    for (const auto& [key, _] : j_.items()) {
      if (!keys.contains(key)) throw FieldError(Join(prefix_, key), "unknown key");
    }
  }

  template <typename T>
  void Get(const std::string& key, T& out) const {
    if (!j_.contains(key)) return;
    try {
      j_.at(key).get_to(out);
    } catch (const json::exception& e) {
      throw FieldError(Join(prefix_, key), e.what());
    }
  }

  template <typename Parse, typename T>
  void GetEnum(const std::string& key, Parse parse, T& out) const {
    if (!j_.contains(key)) return;
    std::string name;
    Get(key, name);
    try {
      out = parse(name);
    } catch (const ConfigError& e) {
      throw FieldError(Join(prefix_, key), e.what());
    }
  }

  const json* Child(const std::string& key) const {
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }
  std::string Path(const std::string& key) const { return Join(prefix_, key); }

 private:
  const json& j_;
  std::string prefix_;
};

std::string Num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string Params(const VectorXd& v, int dim) {
  std::string out;
  for (int i = 0; i < dim; ++i) {
    out += ',';
    if (i < v.size()) out += Num(v(i));
  }
  return out;
}

void WriteFile(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << text;
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool IsMdp(const std::string& env) {
  return env == "mdp1" || env == "mdp2" || env == "mdp3";
}

int BatchSize(const ExperimentConfig& cfg) {
  if (cfg.method == Method::kQLearning) return 1;
  const auto schedule = MakeSchedule(cfg.total_episodes, cfg.mrt_episodes,
                                     cfg.sobol_episodes, cfg.rounds);
  return schedule.batch_sizes.back();
}

std::string AggregateHeader() {
  return "method,environment,search_space,prior_strategy,rounds,batch,"
         "repetitions,mean_avg_return,stderr\n";
}

std::string AggregateRow(const ExperimentConfig& cfg, const Aggregate& agg) {
  std::ostringstream os;
  os << MethodName(cfg.method) << ',' << cfg.environment << ','
     << SearchSpaceName(cfg.search_space) << ','
     << PriorStrategyName(cfg.prior_strategy) << ',' << cfg.rounds << ','
     << BatchSize(cfg) << ',' << agg.repetitions << ','
     << Num(agg.mean_avg_return) << ',' << Num(agg.stderr_avg_return) << '\n';
  return os.str();
}

std::string CellName(const std::map<std::string, json>& choice) {
  std::string out;
  for (const auto& [axis, value] : choice) {
    if (!out.empty()) out += "__";
    out += axis + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
  }
  return out.empty() ? "base" : out;
}

fs::path WriteExperiment(const ExperimentConfig& cfg, const fs::path& dir,
                         int jobs, Aggregate* aggregate) {
  cfg.Validate();
  fs::create_directories(dir);
  std::vector<RepetitionResult> results(cfg.repetitions);
  ParallelFor(cfg.repetitions, jobs,
              [&](int rep) { results[rep] = RunRepetition(cfg, rep); });

  const int dim = ParamDimension(cfg);
  std::string summary = SummaryHeader(dim);
  std::string episodes = EpisodeHeader(dim);
  std::vector<double> averages;
  for (const auto& r : results) {
    WriteFile(dir / ("record_rep" + std::to_string(r.repetition) + ".json"),
              r.record.dump(1) + "\n");
    summary += r.summary_rows;
    episodes += r.episode_rows;
    averages.push_back(r.average_return);
  }
  const Aggregate agg = AggregateReturns(averages);
  WriteFile(dir / "summary.csv", summary);
  WriteFile(dir / "episodes.csv", episodes);
  WriteFile(dir / "aggregate.csv", AggregateHeader() + AggregateRow(cfg, agg));
  WriteFile(dir / "config.json", ToJson(cfg).dump(2) + "\n");
  if (aggregate) *aggregate = agg;
  return dir;
}

RepetitionResult RunQLearning(const ExperimentConfig& cfg, int repetition) {
  const TabularMdp mdp = BuiltinMdp(cfg.environment);
  Rng rng(EpisodeSeed(cfg.seed, static_cast<std::uint64_t>(repetition), 0, 0));
  const auto res = QLearningRun(mdp, cfg.q_learning, cfg.total_episodes, rng);

  RepetitionResult out;
  out.repetition = repetition;
  out.returns = res.returns;
  out.average_return = std::accumulate(res.returns.begin(), res.returns.end(), 0.0) /
                       static_cast<double>(res.returns.size());
  const std::string rep = std::to_string(repetition);
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < res.returns.size(); ++i) {
    const double r = res.returns[i];
    best = std::max(best, r);
    out.summary_rows += rep + ',' + std::to_string(i) + ",1,0," + Num(r) + ',' +
                        Num(best) + ",," + Num(r) + ",,0," +
                        Num(res.greedy_returns[i]) + '\n';
    out.episode_rows += rep + ',' + std::to_string(i) + ",0," + Num(r) + ',' +
                        std::to_string(mdp.horizon) + ",0\n";
  }
  json q = json::array();
  for (int s = 0; s < res.q.rows(); ++s) {
    q.push_back(std::vector<double>(res.q.row(s).data(),
                                    res.q.row(s).data() + res.q.cols()));
  }
  out.record = {{"repetition", repetition},
                {"method", MethodName(cfg.method)},
                {"average_return", out.average_return},
                {"returns", res.returns},
                {"greedy_returns", res.greedy_returns},
                {"epsilons", res.epsilons},
                {"greedy_policy", res.greedy_policy},
                {"q", q}};
  return out;
}

}  // namespace

Method ParseMethod(std::string_view name) {
  if (name == "bots-global") return Method::kBotsGlobal;
  if (name == "bots-turbo") return Method::kBotsTurbo;
  if (name == "ts-fixed") return Method::kTsFixed;
  if (name == "ts-update") return Method::kTsUpdate;
  if (name == "q-learning") return Method::kQLearning;
  throw ConfigError("unknown method '" + std::string(name) + "'");
}

std::string_view MethodName(Method method) {
  switch (method) {
    case Method::kBotsGlobal: return "bots-global";
    case Method::kBotsTurbo: return "bots-turbo";
    case Method::kTsFixed: return "ts-fixed";
    case Method::kTsUpdate: return "ts-update";
    case Method::kQLearning: return "q-learning";
  }
  return "bots-turbo";
}

void ExperimentConfig::Validate() const {
  if (name.empty() || name.find('/') != std::string::npos) {
    throw FieldError("name", "must be a non-empty file name");
  }
  if (environment != "jitai" && !IsMdp(environment)) {
    throw FieldError("environment", "expected jitai, mdp1, mdp2 or mdp3");
  }
  if (method == Method::kQLearning && !IsMdp(environment)) {
    throw FieldError("method", "q-learning runs only on the tabular MDPs");
  }
  if (repetitions < 1) throw FieldError("repetitions", "must be at least 1");
  if (method == Method::kQLearning) {
    if (total_episodes < 1) throw FieldError("total_episodes", "must be at least 1");
    q_learning.Validate();
  } else {
    try {
      MakeSchedule(total_episodes, mrt_episodes, sobol_episodes, rounds);
    } catch (const ConfigError& e) {
      throw FieldError("rounds", e.what());
    }
  }
  if (!(beta_lower < beta_upper)) throw FieldError("bounds.beta_lower", "must be below beta_upper");
  if (!(variance_lower > 0.0 && variance_lower < variance_upper)) {
    throw FieldError("bounds.variance_lower", "must satisfy 0 < variance_lower < variance_upper");
  }
  if (!(prior_scale > 0.0)) throw FieldError("prior.scale", "must be positive");
  if (!(prior_sigma_y2 > 0.0)) throw FieldError("prior.sigma_y2", "must be positive");
  if (acquisition.n_mc < 1 || acquisition.n_restarts < 1 || acquisition.n_raw < 1 ||
      acquisition.max_evaluations < 1) {
    throw FieldError("acquisition", "sample and restart counts must be positive");
  }
  if (!(acquisition.min_step > 0.0 && acquisition.min_step <= acquisition.initial_step)) {
    throw FieldError("acquisition.min_step", "must satisfy 0 < min_step <= initial_step");
  }
  if (gp_random_starts < 0) throw FieldError("gp_random_starts", "must be nonnegative");
  try {
    jitai.Validate();
  } catch (const ConfigError& e) {
    throw FieldError("jitai", e.what());
  }
}

bool ExperimentConfig::operator==(const ExperimentConfig& other) const {
  return ToJson(*this) == ToJson(other);
}

json ToJson(const ExperimentConfig& cfg) {
  return {
      {"name", cfg.name},
      {"environment", cfg.environment},
      {"method", MethodName(cfg.method)},
      {"search_space", SearchSpaceName(cfg.search_space)},
      {"prior_strategy", PriorStrategyName(cfg.prior_strategy)},
      {"total_episodes", cfg.total_episodes},
      {"mrt_episodes", cfg.mrt_episodes},
      {"sobol_episodes", cfg.sobol_episodes},
      {"rounds", cfg.rounds},
      {"repetitions", cfg.repetitions},
      {"seed", cfg.seed},
      {"jitai", cfg.jitai},
      {"feature_mode", FeatureModeName(cfg.feature_mode)},
      {"bounds",
       {{"beta_lower", cfg.beta_lower},
        {"beta_upper", cfg.beta_upper},
        {"variance_lower", cfg.variance_lower},
        {"variance_upper", cfg.variance_upper}}},
      {"prior",
       {{"mean", cfg.prior_mean},
        {"scale", cfg.prior_scale},
        {"sigma_y2", cfg.prior_sigma_y2}}},
      {"acquisition",
       {{"n_mc", cfg.acquisition.n_mc},
        {"n_restarts", cfg.acquisition.n_restarts},
        {"n_raw", cfg.acquisition.n_raw},
        {"max_evaluations", cfg.acquisition.max_evaluations},
        {"initial_step", cfg.acquisition.initial_step},
        {"min_step", cfg.acquisition.min_step}}},
      {"gp_random_starts", cfg.gp_random_starts},
      {"q_learning",
       {{"lr", cfg.q_learning.lr},
        {"gamma", cfg.q_learning.gamma},
        {"eps_start", cfg.q_learning.eps_start},
        {"eps_end", cfg.q_learning.eps_end},
        {"eps_decay", cfg.q_learning.eps_decay}}},
      {"output_dir", cfg.output_dir},
  };
}

namespace {

const std::set<std::string> kExperimentKeys = {
    "name", "environment", "method", "search_space", "prior_strategy",
    "total_episodes", "mrt_episodes", "sobol_episodes", "rounds",
    "repetitions", "seed", "jitai", "feature_mode", "bounds", "prior",
    "acquisition", "gp_random_starts", "q_learning", "output_dir"};

void ReadExperiment(const Reader& r, ExperimentConfig& cfg) {
  r.Get("name", cfg.name);
  r.Get("environment", cfg.environment);
  r.GetEnum("method", ParseMethod, cfg.method);
  r.GetEnum("search_space", ParseSearchSpace, cfg.search_space);
  r.GetEnum("prior_strategy", ParsePriorStrategy, cfg.prior_strategy);
  r.Get("total_episodes", cfg.total_episodes);
  r.Get("mrt_episodes", cfg.mrt_episodes);
  r.Get("sobol_episodes", cfg.sobol_episodes);
  r.Get("rounds", cfg.rounds);
  r.Get("repetitions", cfg.repetitions);
  r.Get("seed", cfg.seed);
  if (const json* j = r.Child("jitai")) {
    try {
      j->get_to(cfg.jitai);
    } catch (const std::exception& e) {
      throw FieldError(r.Path("jitai"), e.what());
    }
  }
  r.GetEnum("feature_mode", ParseFeatureMode, cfg.feature_mode);
  if (const json* j = r.Child("bounds")) {
    Reader b(*j, r.Path("bounds"),
             {"beta_lower", "beta_upper", "variance_lower", "variance_upper"});
    b.Get("beta_lower", cfg.beta_lower);
    b.Get("beta_upper", cfg.beta_upper);
    b.Get("variance_lower", cfg.variance_lower);
    b.Get("variance_upper", cfg.variance_upper);
  }
  if (const json* j = r.Child("prior")) {
    Reader p(*j, r.Path("prior"), {"mean", "scale", "sigma_y2"});
    p.Get("mean", cfg.prior_mean);
    p.Get("scale", cfg.prior_scale);
    p.Get("sigma_y2", cfg.prior_sigma_y2);
  }
  if (const json* j = r.Child("acquisition")) {
    Reader a(*j, r.Path("acquisition"),
             {"n_mc", "n_restarts", "n_raw", "max_evaluations", "initial_step", "min_step"});
    a.Get("n_mc", cfg.acquisition.n_mc);
    a.Get("n_restarts", cfg.acquisition.n_restarts);
    a.Get("n_raw", cfg.acquisition.n_raw);
    a.Get("max_evaluations", cfg.acquisition.max_evaluations);
    a.Get("initial_step", cfg.acquisition.initial_step);
    a.Get("min_step", cfg.acquisition.min_step);
  }
  r.Get("gp_random_starts", cfg.gp_random_starts);
  if (const json* j = r.Child("q_learning")) {
    Reader q(*j, r.Path("q_learning"), {"lr", "gamma", "eps_start", "eps_end", "eps_decay"});
    q.Get("lr", cfg.q_learning.lr);
    q.Get("gamma", cfg.q_learning.gamma);
    q.Get("eps_start", cfg.q_learning.eps_start);
    q.Get("eps_end", cfg.q_learning.eps_end);
    q.Get("eps_decay", cfg.q_learning.eps_decay);
  }
  r.Get("output_dir", cfg.output_dir);
}

const std::set<std::string> kAxes = {"method", "search_space", "prior_strategy",
                                     "environment", "rounds"};

}  // namespace

ExperimentConfig ExperimentFromJson(const json& j) {
  ExperimentConfig cfg;
  ReadExperiment(Reader(j, "", kExperimentKeys), cfg);
  cfg.Validate();
  return cfg;
}

int SweepConfig::cells() const {
  int n = 1;
  for (const auto& [_, values] : axes) n *= static_cast<int>(values.size());
  return n;
}

std::vector<ExperimentConfig> SweepConfig::Expand() const {
  std::vector<ExperimentConfig> out;
  std::vector<std::pair<std::string, const std::vector<json>*>> order;
  for (const auto& [axis, values] : axes) order.emplace_back(axis, &values);
  std::vector<std::size_t> idx(order.size(), 0);
  for (int cell = 0; cell < cells(); ++cell) {
    json j = ToJson(base);
    std::map<std::string, json> choice;
    for (std::size_t a = 0; a < order.size(); ++a) {
      const json& v = (*order[a].second)[idx[a]];
      j[order[a].first] = v;
      choice[order[a].first] = v;
    }
    j["name"] = CellName(choice);
    out.push_back(ExperimentFromJson(j));
    for (std::size_t a = order.size(); a-- > 0;) {
      if (++idx[a] < order[a].second->size()) break;
      idx[a] = 0;
    }
  }
  return out;
}

json ToJson(const SweepConfig& cfg) {
  json j = ToJson(cfg.base);
  json grid = json::object();
  for (const auto& [axis, values] : cfg.axes) grid[axis] = values;
  j["grid"] = grid;
  return j;
}

SweepConfig SweepFromJson(const json& j) {
  auto keys = kExperimentKeys;
  keys.insert("grid");
  SweepConfig cfg;
  Reader r(j, "", keys);
  ReadExperiment(r, cfg.base);
  if (const json* grid = r.Child("grid")) {
    if (!grid->is_object()) throw FieldError("grid", "expected an object of axis lists");
    for (const auto& [axis, values] : grid->items()) {
      if (!kAxes.contains(axis)) throw FieldError("grid." + axis, "unknown sweep axis");
      if (!values.is_array() || values.empty()) {
        throw FieldError("grid." + axis, "expected a non-empty list");
      }
      cfg.axes[axis] = values.get<std::vector<json>>();
    }
  }
  try {
    cfg.Expand();
  } catch (const FieldError& e) {
    throw FieldError("grid." + e.field(), e.what());
  }
  return cfg;
}

namespace {

int LineOf(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

// Line of the first occurrence of the leaf key of a dotted path, or 0.
int LineOfField(const std::string& text, const std::string& field) {
  const auto dot = field.rfind('.');
  const std::string leaf = dot == std::string::npos ? field : field.substr(dot + 1);
  const auto pos = text.find("\"" + leaf + "\"");
  return pos == std::string::npos ? 0 : LineOf(text, pos);
}

std::string ReadText(const fs::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError(path.string() + ": cannot open config file");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

template <typename T, typename Fn>
T LoadWith(const fs::path& path, Fn from_json) {
  const std::string text = ReadText(path);
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ":" + std::to_string(LineOf(text, e.byte)) +
                      ": " + e.what());
  }
  try {
    return from_json(j);
  } catch (const FieldError& e) {
    const int line = LineOfField(text, e.field());
    throw ConfigError(path.string() + ":" + (line > 0 ? std::to_string(line) + ":" : "") +
                      " " + e.what());
  }
}

}  // namespace

json LoadConfigFile(const fs::path& path) {
  return LoadWith<json>(path, [](const json& j) { return j; });
}

ExperimentConfig LoadExperiment(const fs::path& path) {
  return LoadWith<ExperimentConfig>(path, ExperimentFromJson);
}

SweepConfig LoadSweep(const fs::path& path) {
  return LoadWith<SweepConfig>(path, SweepFromJson);
}

EnvFactory MakeEnvFactory(const ExperimentConfig& cfg) {
  if (cfg.environment == "jitai") {
    return [jc = cfg.jitai, mode = cfg.feature_mode] {
      return std::make_unique<JitaiEnvironment>(jc, mode);
    };
  }
  return [mdp = BuiltinMdp(cfg.environment)] {
    return std::make_unique<TabularEnvironment>(mdp);
  };
}

BotsConfig MakeBotsConfig(const ExperimentConfig& cfg) {
  BotsConfig bc;
  bc.search_space = cfg.search_space;
  bc.bo_mode = cfg.method == Method::kBotsGlobal ? BoMode::kGlobal : BoMode::kTurbo;
  bc.prior_strategy = cfg.prior_strategy;
  if (cfg.method == Method::kTsFixed) bc.prior_strategy = PriorStrategy::kFixed;
  if (cfg.method == Method::kTsUpdate) bc.prior_strategy = PriorStrategy::kUpdate;
  bc.schedule = MakeSchedule(cfg.total_episodes, cfg.mrt_episodes,
                             cfg.sobol_episodes, cfg.rounds);
  bc.base_seed = cfg.seed;
  bc.beta_lower = cfg.beta_lower;
  bc.beta_upper = cfg.beta_upper;
  bc.variance_lower = cfg.variance_lower;
  bc.variance_upper = cfg.variance_upper;
  bc.prior_mean = cfg.prior_mean;
  bc.prior_scale = cfg.prior_scale;
  bc.prior_sigma_y2 = cfg.prior_sigma_y2;
  bc.acquisition = cfg.acquisition;
  bc.gp_random_starts = cfg.gp_random_starts;
  bc.jobs = 1;
  return bc;
}

int ParamDimension(const ExperimentConfig& cfg) {
  if (cfg.method == Method::kQLearning) return 0;
  const int actions = MakeEnvFactory(cfg)()->num_actions();
  const bool ts = cfg.method == Method::kTsFixed || cfg.method == Method::kTsUpdate;
  return SearchDimension(ts ? SearchSpace::kBeta : cfg.search_space, actions);
}

std::string SummaryHeader(int param_dim) {
  std::string h = "rep,round,batch_size,candidate_id";
  for (int i = 0; i < param_dim; ++i) h += ",p" + std::to_string(i);
  return h + ",return,best_so_far,tr_length,round_best,acq_value,acq_restarts,greedy_return\n";
}

std::string EpisodeHeader(int param_dim) {
  std::string h = "rep,round,candidate_id";
  for (int i = 0; i < param_dim; ++i) h += ",p" + std::to_string(i);
  return h + ",return,length,terminated_early\n";
}

RepetitionResult RunRepetition(const ExperimentConfig& cfg, int repetition) {
  if (cfg.method == Method::kQLearning) return RunQLearning(cfg, repetition);
  const BotsConfig bc = MakeBotsConfig(cfg);
  const EnvFactory factory = MakeEnvFactory(cfg);
  const bool ts = cfg.method == Method::kTsFixed || cfg.method == Method::kTsUpdate;
  const RunRecord rec = ts ? RunTsBaseline(bc, factory, repetition)
                           : RunBots(bc, factory, repetition);
  const int dim = ParamDimension(cfg);

  RepetitionResult out;
  out.repetition = repetition;
  out.returns = rec.Returns();
  out.average_return = rec.average_return;
  out.record = ToJson(rec);
  out.record["method"] = MethodName(cfg.method);
  const std::string rep = std::to_string(repetition);
  for (std::size_t b = 0; b < rec.mrt.size(); ++b) {
    const auto& e = rec.mrt[b];
    out.episode_rows += rep + ",-1," + std::to_string(b) + Params(VectorXd(), dim) + ',' +
                        Num(e.total_return) + ',' + std::to_string(e.length) + ',' +
                        (e.terminated_early ? "1" : "0") + '\n';
  }
  for (const auto& rr : rec.rounds) {
    std::size_t best = 0;
    double mean = 0.0;
    for (std::size_t b = 0; b < rr.episodes.size(); ++b) {
      const auto& e = rr.episodes[b];
      mean += e.total_return;
      if (e.total_return > rr.episodes[best].total_return) best = b;
      out.episode_rows += rep + ',' + std::to_string(rr.round) + ',' + std::to_string(b) +
                          Params(e.params, dim) + ',' + Num(e.total_return) + ',' +
                          std::to_string(e.length) + ',' +
                          (e.terminated_early ? "1" : "0") + '\n';
    }
    mean /= static_cast<double>(rr.episodes.size());
    out.summary_rows += rep + ',' + std::to_string(rr.round) + ',' +
                        std::to_string(rr.episodes.size()) + ',' + std::to_string(best) +
                        Params(rr.episodes[best].params, dim) + ',' + Num(mean) + ',' +
                        Num(rr.best_so_far) + ',' +
                        (rr.trust_region ? Num(rr.trust_region->length) : "") + ',' +
                        Num(rr.episodes[best].total_return) + ',' +
                        (rr.gp ? Num(rr.acquisition_value) : "") + ',' +
                        std::to_string(rr.acquisition_restarts) + ",\n";
  }
  return out;
}

Aggregate AggregateReturns(const std::vector<double>& values) {
  Aggregate agg;
  agg.repetitions = static_cast<int>(values.size());
  if (values.empty()) return agg;
  const double n = static_cast<double>(values.size());
  agg.mean_avg_return = std::accumulate(values.begin(), values.end(), 0.0) / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - agg.mean_avg_return) * (v - agg.mean_avg_return);
    agg.stderr_avg_return = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return agg;
}

fs::path RunExperiment(const ExperimentConfig& cfg, const fs::path& out_dir,
                       int jobs, Aggregate* aggregate) {
  return WriteExperiment(cfg, out_dir / "runs" / cfg.name, jobs, aggregate);
}

fs::path RunSweep(const SweepConfig& cfg, const fs::path& out_dir, int jobs) {
  const auto cells = cfg.Expand();
  const fs::path dir = out_dir / "sweeps" / cfg.base.name;
  fs::create_directories(dir / "cells");
  std::string csv = "cell," + AggregateHeader();
  json manifest = {{"name", cfg.base.name}, {"cells", json::array()}};
  for (const auto& cell : cells) {
    Aggregate agg;
    WriteExperiment(cell, dir / "cells" / cell.name, jobs, &agg);
    csv += cell.name + ',' + AggregateRow(cell, agg);
    manifest["cells"].push_back({{"name", cell.name},
                                 {"method", MethodName(cell.method)},
                                 {"environment", cell.environment},
                                 {"search_space", SearchSpaceName(cell.search_space)},
                                 {"prior_strategy", PriorStrategyName(cell.prior_strategy)},
                                 {"rounds", cell.rounds},
                                 {"batch", BatchSize(cell)}});
  }
  WriteFile(dir / "sweep.csv", csv);
  WriteFile(dir / "sweep.json", manifest.dump(2) + "\n");
  WriteFile(dir / "config.json", ToJson(cfg).dump(2) + "\n");
  return dir;
}

fs::path WritePlotData(const fs::path& sweep_dir, std::ostream& warnings) {
  const json manifest = LoadConfigFile(sweep_dir / "sweep.json");
  struct Row {
    std::string method, search_space;
    int rounds, batch;
    std::string mean, stderr_;
  };
  std::vector<Row> rows;
  for (const auto& cell : manifest.at("cells")) {
    const std::string name = cell.at("name").get<std::string>();
    const fs::path agg = sweep_dir / "cells" / name / "aggregate.csv";
    std::ifstream f(agg);
    std::string header, line;
    if (!f || !std::getline(f, header) || !std::getline(f, line)) {
      warnings << "warning: missing cell " << name << " (" << agg.string() << "), skipped\n";
      continue;
    }
    const auto keys = SplitCsv(header), vals = SplitCsv(line);
    std::map<std::string, std::string> m;
    for (std::size_t i = 0; i < keys.size() && i < vals.size(); ++i) m[keys[i]] = vals[i];
    rows.push_back({cell.at("method"), cell.at("search_space"), cell.at("rounds"),
                    cell.at("batch"), m["mean_avg_return"], m["stderr"]});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.method, a.rounds, a.search_space) <
           std::tie(b.method, b.rounds, b.search_space);
  });
  std::string csv = "method,search_space,rounds,batch,mean_avg_return,stderr\n";
  for (const auto& r : rows) {
    csv += r.method + ',' + r.search_space + ',' + std::to_string(r.rounds) + ',' +
           std::to_string(r.batch) + ',' + r.mean + ',' + r.stderr_ + '\n';
  }
  const fs::path out = sweep_dir / "plotdata.csv";
  WriteFile(out, csv);
  return out;
}

}  // namespace bots
