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

#ifndef BOTS_REWARD_MODEL_HPP_
#define BOTS_REWARD_MODEL_HPP_

#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>
#include <json.hpp>

#include "bots/random.hpp"

namespace bots {

using Eigen::MatrixXd;
using Eigen::VectorXd;

/// Gaussian posterior N(mu, sigma) over the weights of one action's linear
/// reward model, together with the fixed observation noise variance.
struct GaussianLinearBelief {
  VectorXd mu;
  MatrixXd sigma;
  double sigma_y2 = 1.0;

  int dim() const { return static_cast<int>(mu.size()); }

  /// Isotropic prior N(mean * 1, scale * I).
  static GaussianLinearBelief Isotropic(int dim, double mean, double scale,
                                        double sigma_y2);
};

/// One belief per action, all of the same feature dimension.
using BeliefSet = std::vector<GaussianLinearBelief>;

/// Observation (features, reward) for a single action.
struct Observation {
  VectorXd features;
  double reward = 0.0;
};

/// Conjugate one-observation update. When `taken` is false the belief is
/// returned unchanged, mirroring the indicator in the update rule.
///
/// Throws InvalidInput for non-finite or mis-sized input and NumericalError
/// when the covariance cannot be factorized.
GaussianLinearBelief PosteriorUpdate(const GaussianLinearBelief& belief,
                                     const VectorXd& features, double reward,
                                     bool taken = true);

/// Joint conjugate posterior of `prior` given every observation. An empty
/// list returns the prior.
GaussianLinearBelief BatchFit(const GaussianLinearBelief& prior,
                              std::span<const Observation> observations);

/// Draws mu + L z with L the lower Cholesky factor of sigma and z ~ N(0, I).
/// Consumes exactly dim() standard normal draws from `rng`.
VectorXd SampleWeights(const GaussianLinearBelief& belief, Rng& rng);

/// Throws InvalidInput if the set is empty or dimensions disagree.
void ValidateBeliefSet(const BeliefSet& beliefs);

nlohmann::json ToJson(const GaussianLinearBelief& belief);
GaussianLinearBelief BeliefFromJson(const nlohmann::json& j);

}  // namespace bots

#endif  // BOTS_REWARD_MODEL_HPP_
