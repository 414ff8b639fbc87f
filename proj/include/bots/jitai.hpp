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

#ifndef BOTS_JITAI_HPP_
#define BOTS_JITAI_HPP_

#include <array>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bots/environment.hpp"

namespace bots {

// Behavioral simulator of a daily-message physical activity intervention.
// Actions: 0 no message, 1 generic message, 2 message tailored to context 0,
// 3 message tailored to context 1.
inline constexpr int kJitaiActions = 4;

struct JitaiConfig {
  double sigma = 0.1;           // context feature noise
  double delta_h = 0.1;         // habituation decay
  double eps_h = 0.05;          // habituation increment
  double delta_d = 0.1;         // disengagement decay
  double eps_d = 0.4;           // disengagement increment
  std::array<double, 2> mu_s{0.1, 0.1};
  double rho1 = 50.0;           // generic message effect
  double rho2 = 200.0;          // tailored message effect
  double d_threshold = 0.99;
  int horizon = 50;

  void Validate() const;
  bool operator==(const JitaiConfig&) const = default;
};

struct JitaiState {
  int c = 0;                     // true context
  double x = 0.0;                // noisy context feature
  std::array<double, 2> p{0.5, 0.5};
  int l = 0;                     // inferred context, argmax of p
  double h = 0.0;                // habituation
  double d = 0.0;                // disengagement risk
  double s = 0.0;                // last step count
  int t = 0;                     // days elapsed
};

struct JitaiTransition {
  JitaiState state;
  double reward = 0.0;
  bool done = false;
};

enum class FeatureMode { kProbability, kOneHot };

FeatureMode ParseFeatureMode(std::string_view name);
std::string_view FeatureModeName(FeatureMode mode);

// Posterior probability of context 1 given feature x under a uniform prior
// and N(c, sigma^2) likelihoods.
double ContextProbability(double x, double sigma);

JitaiState JitaiReset(const JitaiConfig& cfg, Rng& rng);
JitaiTransition JitaiStep(const JitaiState& state, int action,
                          const JitaiConfig& cfg, Rng& rng);
// [1, p_1] for kProbability, [1, l] for kOneHot.
Eigen::VectorXd JitaiObserve(const JitaiState& state, FeatureMode mode);

class JitaiEnvironment final : public Environment {
 public:
  explicit JitaiEnvironment(JitaiConfig cfg,
                            FeatureMode mode = FeatureMode::kProbability);

  void Reset(Rng& rng) override;
  Eigen::VectorXd Observe() const override;
  StepResult Step(int action, Rng& rng) override;

  int num_actions() const override { return kJitaiActions; }
  int feature_dim() const override { return 2; }
  int horizon() const override { return cfg_.horizon; }

  const JitaiState& state() const { return state_; }
  const JitaiConfig& config() const { return cfg_; }

 private:
  JitaiConfig cfg_;
  FeatureMode mode_;
  JitaiState state_;
  bool done_ = false;
};

void to_json(nlohmann::json& j, const JitaiConfig& cfg);
// Missing keys keep defaults; unknown keys throw ConfigError.
void from_json(const nlohmann::json& j, JitaiConfig& cfg);

}  // namespace bots

#endif  // BOTS_JITAI_HPP_
