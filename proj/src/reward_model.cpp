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

#include "bots/reward_model.hpp"

#include <cmath>
#include <string>

#include <Eigen/Cholesky>

#include "bots/errors.hpp"

namespace bots {
namespace {

bool AllFinite(const VectorXd& v) { return v.allFinite(); }

void CheckBelief(const GaussianLinearBelief& b) {
  if (b.sigma.rows() != b.mu.size() || b.sigma.cols() != b.mu.size()) {
    throw InvalidInput("belief covariance does not match mean dimension");
  }
  if (!(b.sigma_y2 > 0.0) || !std::isfinite(b.sigma_y2)) {
    throw InvalidInput("reward noise variance must be positive and finite");
  }
}

// Precision matrix and precision-weighted mean of a belief via Cholesky
// solves against the covariance.
std::pair<MatrixXd, VectorXd> NaturalParameters(const GaussianLinearBelief& b) {
  Eigen::LLT<MatrixXd> llt(b.sigma);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("belief covariance is not positive definite");
  }
  const auto d = b.mu.size();
  MatrixXd precision = llt.solve(MatrixXd::Identity(d, d));
  VectorXd shift = llt.solve(b.mu);
  return {std::move(precision), std::move(shift)};
}

GaussianLinearBelief FromNatural(const MatrixXd& precision,
                                 const VectorXd& shift, double sigma_y2) {
  const MatrixXd sym = 0.5 * (precision + precision.transpose());
  Eigen::LLT<MatrixXd> llt(sym);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("posterior precision is not positive definite");
  }
  GaussianLinearBelief out;
  out.sigma = llt.solve(MatrixXd::Identity(sym.rows(), sym.cols()));
  out.sigma = 0.5 * (out.sigma + out.sigma.transpose());
  out.mu = out.sigma * shift;
  out.sigma_y2 = sigma_y2;
  return out;
}

}  // namespace

GaussianLinearBelief GaussianLinearBelief::Isotropic(int dim, double mean,
                                                     double scale,
                                                     double sigma_y2) {
  GaussianLinearBelief b;
  b.mu = VectorXd::Constant(dim, mean);
  b.sigma = scale * MatrixXd::Identity(dim, dim);
  b.sigma_y2 = sigma_y2;
  return b;
}

GaussianLinearBelief PosteriorUpdate(const GaussianLinearBelief& belief,
                                     const VectorXd& features, double reward,
                                     bool taken) {
  CheckBelief(belief);
  if (features.size() != belief.mu.size()) {
    throw InvalidInput("feature dimension " + std::to_string(features.size()) +
                       " does not match belief dimension " +
                       std::to_string(belief.mu.size()));
  }
  if (!AllFinite(features) || !std::isfinite(reward)) {
    throw InvalidInput("non-finite features or reward");
  }
  if (!taken) return belief;

  auto [precision, shift] = NaturalParameters(belief);
  precision.noalias() += features * features.transpose() / belief.sigma_y2;
  shift += (reward / belief.sigma_y2) * features;
  return FromNatural(precision, shift, belief.sigma_y2);
}

GaussianLinearBelief BatchFit(const GaussianLinearBelief& prior,
                              std::span<const Observation> observations) {
  CheckBelief(prior);
  if (observations.empty()) return prior;

  auto [precision, shift] = NaturalParameters(prior);
  const double inv_noise = 1.0 / prior.sigma_y2;
  for (const auto& obs : observations) {
    if (obs.features.size() != prior.mu.size()) {
      throw InvalidInput("observation dimension does not match prior");
    }
    if (!AllFinite(obs.features) || !std::isfinite(obs.reward)) {
      throw InvalidInput("non-finite observation");
    }
    precision.noalias() += inv_noise * obs.features * obs.features.transpose();
    shift += (inv_noise * obs.reward) * obs.features;
  }
  return FromNatural(precision, shift, prior.sigma_y2);
}

VectorXd SampleWeights(const GaussianLinearBelief& belief, Rng& rng) {
  CheckBelief(belief);
  Eigen::LLT<MatrixXd> llt(belief.sigma);
  if (llt.info() != Eigen::Success) {
    throw NumericalError("cannot sample: covariance is not positive definite");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  VectorXd z(belief.mu.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = normal(rng);
  return belief.mu + llt.matrixL() * z;
}

void ValidateBeliefSet(const BeliefSet& beliefs) {
  if (beliefs.empty()) throw InvalidInput("belief set is empty");
  const auto d = beliefs.front().mu.size();
  for (const auto& b : beliefs) {
    CheckBelief(b);
    if (b.mu.size() != d) {
      throw InvalidInput("beliefs disagree on feature dimension");
    }
  }
}

nlohmann::json ToJson(const GaussianLinearBelief& belief) {
  nlohmann::json j;
  j["mu"] = std::vector<double>(belief.mu.data(),
                                belief.mu.data() + belief.mu.size());
  std::vector<double> rows;
  rows.reserve(belief.sigma.size());
  for (Eigen::Index r = 0; r < belief.sigma.rows(); ++r) {
    for (Eigen::Index c = 0; c < belief.sigma.cols(); ++c) {
      rows.push_back(belief.sigma(r, c));
    }
  }
  j["sigma"] = std::move(rows);
  j["sigma_y2"] = belief.sigma_y2;
  return j;
}

GaussianLinearBelief BeliefFromJson(const nlohmann::json& j) {
  const auto mu = j.at("mu").get<std::vector<double>>();
  const auto flat = j.at("sigma").get<std::vector<double>>();
  const auto d = static_cast<Eigen::Index>(mu.size());
  if (static_cast<Eigen::Index>(flat.size()) != d * d) {
    throw InvalidInput("belief sigma must hold dim*dim entries");
  }
  GaussianLinearBelief b;
  b.mu = Eigen::Map<const VectorXd>(mu.data(), d);
  b.sigma.resize(d, d);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) b.sigma(r, c) = flat[r * d + c];
  }
  b.sigma_y2 = j.at("sigma_y2").get<double>();
  CheckBelief(b);
  return b;
}

}  // namespace bots
