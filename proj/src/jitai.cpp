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

#include "bots/jitai.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "bots/errors.hpp"

namespace bots {
namespace {

bool InOpenUnit(double v) { return v > 0.0 && v < 1.0; }

// Draws c ~ Ber(0.5), x ~ N(c, sigma^2) and the derived p and l.
void DrawContext(JitaiState& st, const JitaiConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  st.c = unif(rng) < 0.5 ? 0 : 1;
  st.x = static_cast<double>(st.c) + cfg.sigma * normal(rng);
  const double p1 = ContextProbability(st.x, cfg.sigma);
  st.p = {1.0 - p1, p1};
  st.l = st.p[1] > st.p[0] ? 1 : 0;
}

}  // namespace

void JitaiConfig::Validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw ConfigError("jitai.sigma must be positive");
  }
  if (!InOpenUnit(delta_h) || !InOpenUnit(eps_h) || !InOpenUnit(delta_d) ||
      !InOpenUnit(eps_d)) {
    throw ConfigError("jitai decay and increment rates must lie in (0, 1)");
  }
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) {
    throw ConfigError("jitai message effects must be positive");
  }
  if (!(d_threshold > 0.0 && d_threshold <= 1.0)) {
    throw ConfigError("jitai.d_threshold must lie in (0, 1]");
  }
  if (horizon < 1) throw ConfigError("jitai.horizon must be at least 1");
}

FeatureMode ParseFeatureMode(std::string_view name) {
  if (name == "prob") return FeatureMode::kProbability;
  if (name == "onehot") return FeatureMode::kOneHot;
  throw ConfigError("unknown feature mode '" + std::string(name) +
                    "' (expected prob or onehot)");
}

std::string_view FeatureModeName(FeatureMode mode) {
  return mode == FeatureMode::kProbability ? "prob" : "onehot";
}

double ContextProbability(double x, double sigma) {
  const double z = (2.0 * x - 1.0) / (2.0 * sigma * sigma);
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

JitaiState JitaiReset(const JitaiConfig& cfg, Rng& rng) {
  JitaiState st;
  DrawContext(st, cfg, rng);
  return st;
}

JitaiTransition JitaiStep(const JitaiState& state, int action,
                          const JitaiConfig& cfg, Rng& rng) {
  if (action < 0 || action >= kJitaiActions) {
    throw InvalidInput("jitai action must be in {0,1,2,3}, got " +
                       std::to_string(action));
  }
  JitaiTransition out;
  JitaiState& next = out.state;
  next = state;

  const bool tailored = action == state.c + 2;

  // Habituation first: the reward uses the updated level.
  next.h = action == 0 ? (1.0 - cfg.delta_h) * state.h
                       : std::min(1.0, state.h + cfg.eps_h);

  if (action == 0) {
    next.d = state.d;
  } else if (action == 1 || tailored) {
    next.d = (1.0 - cfg.delta_d) * state.d;
  } else {
    next.d = std::min(1.0, state.d + cfg.eps_d);
  }
  next.h = std::clamp(next.h, 0.0, 1.0);
  next.d = std::clamp(next.d, 0.0, 1.0);

  const double base = cfg.mu_s[static_cast<std::size_t>(state.c)];
  if (action == 1) {
    next.s = base + (1.0 - next.h) * cfg.rho1;
  } else if (tailored) {
    next.s = base + (1.0 - next.h) * cfg.rho2;
  } else {
    next.s = base;
  }
  out.reward = next.s;

  next.t = state.t + 1;
  out.done = next.d > cfg.d_threshold || next.t >= cfg.horizon;

  DrawContext(next, cfg, rng);
  return out;
}

Eigen::VectorXd JitaiObserve(const JitaiState& state, FeatureMode mode) {
  Eigen::VectorXd s(2);
  s(0) = 1.0;
  s(1) = mode == FeatureMode::kProbability ? state.p[1]
                                           : static_cast<double>(state.l);
  return s;
}

JitaiEnvironment::JitaiEnvironment(JitaiConfig cfg, FeatureMode mode)
    : cfg_(std::move(cfg)), mode_(mode) {
  cfg_.Validate();
}

void JitaiEnvironment::Reset(Rng& rng) {
  state_ = JitaiReset(cfg_, rng);
  done_ = false;
}

Eigen::VectorXd JitaiEnvironment::Observe() const {
  return JitaiObserve(state_, mode_);
}

StepResult JitaiEnvironment::Step(int action, Rng& rng) {
  if (done_) throw InvalidInput("jitai episode already finished");
  auto tr = JitaiStep(state_, action, cfg_, rng);
  state_ = tr.state;
  done_ = tr.done;
  return {tr.reward, tr.done};
}

void to_json(nlohmann::json& j, const JitaiConfig& cfg) {
  j = nlohmann::json{{"sigma", cfg.sigma},     {"delta_h", cfg.delta_h},
                     {"eps_h", cfg.eps_h},     {"delta_d", cfg.delta_d},
                     {"eps_d", cfg.eps_d},     {"mu_s", cfg.mu_s},
                     {"rho1", cfg.rho1},       {"rho2", cfg.rho2},
                     {"d_threshold", cfg.d_threshold},
                     {"horizon", cfg.horizon}};
}

void from_json(const nlohmann::json& j, JitaiConfig& cfg) {
  if (!j.is_object()) throw ConfigError("jitai: expected an object");
  static const std::set<std::string> kKeys = {
      "sigma", "delta_h", "eps_h", "delta_d", "eps_d",
      "mu_s",  "rho1",    "rho2",  "d_threshold", "horizon"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) throw ConfigError("jitai: unknown key '" + key + "'");
  }
  auto read = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  read("sigma", cfg.sigma);
  read("delta_h", cfg.delta_h);
  read("eps_h", cfg.eps_h);
  read("delta_d", cfg.delta_d);
  read("eps_d", cfg.eps_d);
  read("mu_s", cfg.mu_s);
  read("rho1", cfg.rho1);
  read("rho2", cfg.rho2);
  read("d_threshold", cfg.d_threshold);
  read("horizon", cfg.horizon);
}

}  // namespace bots
