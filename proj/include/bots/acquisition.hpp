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

#ifndef BOTS_ACQUISITION_HPP_
#define BOTS_ACQUISITION_HPP_

#include <cstdint>

#include <Eigen/Core>
#include <json.hpp>

#include "bots/gp.hpp"

namespace bots {

// Box in unit-cube coordinates. Unlike ParamBounds it may be degenerate
// (lower == upper) along any axis.
struct SearchBox {
  VectorXd lower;
  VectorXd upper;

  static SearchBox UnitCube(int dim);
  int dim() const { return static_cast<int>(lower.size()); }
  bool Contains(const VectorXd& u, double tol = 0.0) const;
};

// First n points of a Sobol sequence in [0,1)^dim, scrambled by a random
// digital shift drawn from `seed`.
MatrixXd SobolUnit(int n, int dim, std::uint64_t seed);

// n Sobol points mapped affinely into `bounds`; rows are points.
MatrixXd SobolBatch(const ParamBounds& bounds, int n, std::uint64_t seed);

// Standard normal base samples, n_mc rows by q columns.
MatrixXd QeiBaseSamples(int n_mc, int q, std::uint64_t seed);

struct QeiEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// Monte Carlo batch expected improvement over `best_f` (standardized units)
// for unit-cube rows `batch`, using the first batch.rows() columns of
// `base_samples`.
QeiEstimate QeiWithSamples(const GpSurrogate& model, const MatrixXd& batch,
                           double best_f, const MatrixXd& base_samples);

double Qei(const GpSurrogate& model, const MatrixXd& batch, double best_f,
           int n_mc, std::uint64_t base_seed);

// Closed-form single-point expected improvement.
double AnalyticEi(double mean, double sd, double best_f);

struct QeiOptions {
  int n_mc = 512;
  int n_restarts = 8;
  int n_raw = 256;
  // Pattern-search evaluation budget per restart.
  int max_evaluations = 1500;
  double initial_step = 0.1;
  double min_step = 1e-3;
  std::uint64_t seed = 0;
};

struct QeiResult {
  MatrixXd points;           // q x D, unit-cube coordinates
  double value = 0.0;        // qEI of `points`
  double raw_best_value = 0.0;
  int restarts = 0;
  int evaluations = 0;
};

// Sobol raw batches inside `box`, the best n_restarts refined by coordinate
// pattern search under common base samples. Every returned point lies in
// `box`.
QeiResult OptimizeQei(const GpSurrogate& model, const SearchBox& box, int q,
                      double best_f, const QeiOptions& opts);

// Single trust region (TuRBO-1) bookkeeping in unit-cube coordinates.
struct TrustRegionState {
  VectorXd center;
  double length = 0.8;
  int succ_count = 0;
  int fail_count = 0;
  int succ_tol = 3;
  int fail_tol = 3;
  double l_min = 1.0 / 128.0;
  double l_max = 1.6;
  double l_init = 0.8;
  int restarts = 0;

  // Reference defaults with fail_tol = max(3, dim).
  static TrustRegionState Initial(VectorXd center);
};

// Success iff batch_best_return > incumbent_return. Doubles the edge after
// succ_tol successes, halves it after fail_tol failures and restarts at
// l_init once it drops below l_min. The center is left to the caller.
TrustRegionState TurboUpdate(TrustRegionState tr, double batch_best_return,
                             double incumbent_return);

// Box centered on tr.center with per-axis widths proportional to the
// lengthscales, volume length^dim, clipped to the unit cube.
SearchBox TurboBounds(const TrustRegionState& tr, const VectorXd& lengthscale);

nlohmann::json ToJson(const TrustRegionState& tr);

}  // namespace bots

#endif  // BOTS_ACQUISITION_HPP_
