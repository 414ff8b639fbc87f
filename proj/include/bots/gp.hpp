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

#ifndef BOTS_GP_HPP_
#define BOTS_GP_HPP_

#include <cstdint>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <json.hpp>

namespace bots {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Axis-aligned box in original parameter units.
struct ParamBounds {
  VectorXd lower;
  VectorXd upper;

  int dim() const { return static_cast<int>(lower.size()); }
  // Throws InvalidInput unless lower < upper elementwise.
  void Validate() const;
  // Rows of `x` mapped to and from the unit cube.
  MatrixXd ToUnit(const MatrixXd& x) const;
  MatrixXd FromUnit(const MatrixXd& u) const;
};

struct GpHyperparameters {
  VectorXd lengthscale;     // one per input dimension
  double outputscale = 1.0; // signal variance, k(x, x)
  double noise_sd = 0.7;    // observation noise standard deviation

  int dim() const { return static_cast<int>(lengthscale.size()); }
};

// Matern 5/2 with per-dimension lengthscales: outputscale times
// (1 + sqrt(5) r + 5 r^2 / 3) exp(-sqrt(5) r), r the scaled distance.
double Matern52(const VectorXd& x1, const VectorXd& x2,
                const VectorXd& lengthscale, double outputscale);

// Cross-covariance between the rows of a and the rows of b.
MatrixXd KernelMatrix(const MatrixXd& a, const MatrixXd& b,
                      const GpHyperparameters& hp);

// Hyperprior densities; Gamma(shape, rate).
struct GpPriors {
  double lengthscale_shape = 3.0;
  double lengthscale_rate = 6.0;
  double outputscale_shape = 2.0;
  double outputscale_rate = 0.15;
  double noise_sd_init = 0.7;
  double noise_sd_min = 1e-4;
};

struct GpFitOptions {
  int n_random_starts = 5;
  std::uint64_t seed = 0;
  GpPriors priors;
};

// Exact GP regression on unit-cube inputs and standardized targets.
// Immutable once built.
class GpSurrogate {
 public:
  struct Prediction {
    VectorXd mean;
    MatrixXd cov;
  };

  // Factorizes K + noise I for the given data and hyperparameters. `x_unit`
  // rows are points. `y_mean` and `y_scale` undo the target standardization.
  GpSurrogate(MatrixXd x_unit, VectorXd y, GpHyperparameters hp,
              ParamBounds bounds, double y_mean = 0.0, double y_scale = 1.0);

  const MatrixXd& x() const { return x_; }
  const VectorXd& y() const { return y_; }
  const GpHyperparameters& hyper() const { return hp_; }
  const ParamBounds& bounds() const { return bounds_; }
  double y_mean() const { return y_mean_; }
  double y_scale() const { return y_scale_; }
  double jitter() const { return jitter_; }
  int size() const { return static_cast<int>(y_.size()); }
  int dim() const { return hp_.dim(); }

  // Joint posterior of the latent function at unit-cube rows `xq`, in
  // standardized units.
  Prediction Posterior(const MatrixXd& xq) const;
  // Marginal mean and variance only.
  std::pair<VectorXd, VectorXd> MeanVariance(const MatrixXd& xq) const;
  // Mean and variance in original return units at raw parameter rows.
  std::pair<VectorXd, VectorXd> PredictRaw(const MatrixXd& x_raw) const;

  double LogMarginalLikelihood() const;
  // Gradient with respect to (log lengthscale..., log outputscale,
  // log noise variance).
  VectorXd LogMarginalLikelihoodGradient() const;

 private:
  MatrixXd x_;
  VectorXd y_;
  GpHyperparameters hp_;
  ParamBounds bounds_;
  double y_mean_;
  double y_scale_;
  double jitter_ = 0.0;
  Eigen::LLT<MatrixXd> chol_;
  VectorXd alpha_;
};

struct Standardization {
  double mean = 0.0;
  double scale = 1.0;  // 1 for constant targets
  VectorXd values;     // zero vector for constant targets
};

// Zero mean, unit sample standard deviation (n - 1 denominator).
Standardization Standardize(const VectorXd& y);

// Normalizes inputs to the unit cube, standardizes targets, and maximizes
// log marginal likelihood plus log hyperprior density from the default start
// and n_random_starts draws from the hyperpriors. Throws InvalidInput when
// fewer than two points are given.
GpSurrogate FitGp(const MatrixXd& x_raw, const VectorXd& y_raw,
                  const ParamBounds& bounds, const GpFitOptions& opts = {});

// Log marginal likelihood plus log hyperprior density.
double LogPosteriorObjective(const GpSurrogate& model, const GpPriors& priors);

nlohmann::json ToJson(const GpSurrogate& model);
GpSurrogate SurrogateFromJson(const nlohmann::json& j);

}  // namespace bots

#endif  // BOTS_GP_HPP_
