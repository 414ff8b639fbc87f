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

#ifndef BOTS_BFGS_HPP_
#define BOTS_BFGS_HPP_

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Core>

namespace bots {

struct BfgsOptions {
  int max_iterations = 200;
  double gradient_tolerance = 1e-6;
  double step_tolerance = 1e-10;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  int iterations = 0;
};

// Box-projected BFGS with Armijo backtracking. The objective returns the
// value and writes the gradient; a non-finite value marks an infeasible
// point and makes the line search back off.
inline BfgsResult MinimizeBfgs(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>& f,
    Eigen::VectorXd x0, const Eigen::VectorXd& lower,
    const Eigen::VectorXd& upper, const BfgsOptions& opts = {}) {
  const auto n = x0.size();
  auto project = [&](Eigen::VectorXd v) {
    return v.cwiseMax(lower).cwiseMin(upper).eval();
  };
  BfgsResult res;
  res.x = project(std::move(x0));
  Eigen::VectorXd grad(n);
  res.value = f(res.x, grad);
  if (!std::isfinite(res.value)) return res;

  Eigen::MatrixXd h_inv = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd trial_grad(n);
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    // Projected gradient: ignore components pushing against an active bound.
    Eigen::VectorXd pg = grad;
    for (Eigen::Index i = 0; i < n; ++i) {
      if ((res.x(i) <= lower(i) && grad(i) > 0) ||
          (res.x(i) >= upper(i) && grad(i) < 0)) {
        pg(i) = 0.0;
      }
    }
    if (pg.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) break;

    Eigen::VectorXd dir = -h_inv * pg;
    if (dir.dot(pg) >= 0.0) {
      h_inv.setIdentity();
      dir = -pg;
    }
    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd trial;
    double trial_value = 0.0;
    for (int ls = 0; ls < 40; ++ls) {
      trial = project(res.x + step * dir);
      trial_value = f(trial, trial_grad);
      if (std::isfinite(trial_value) &&
          trial_value <= res.value + 1e-4 * grad.dot(trial - res.x)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;

    const Eigen::VectorXd s = trial - res.x;
    const Eigen::VectorXd y = trial_grad - grad;
    const double improvement = res.value - trial_value;
    res.x = trial;
    res.value = trial_value;
    grad = trial_grad;
    if (s.norm() < opts.step_tolerance || improvement < 1e-12) break;

    const double sy = s.dot(y);
    if (sy > 1e-12) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
      h_inv = (id - rho * s * y.transpose()) * h_inv *
                  (id - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
  }
  return res;
}

}  // namespace bots

#endif  // BOTS_BFGS_HPP_
