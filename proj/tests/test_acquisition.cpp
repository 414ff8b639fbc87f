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

#include <algorithm>
#include <cmath>
#include <random>

#include <doctest.h>

#include "bots/acquisition.hpp"
#include "bots/random.hpp"

namespace bots {
namespace {

GpHyperparameters Hyper(int dim, double ls, double os, double noise) {
  GpHyperparameters hp;
  hp.lengthscale = VectorXd::Constant(dim, ls);
  hp.outputscale = os;
  hp.noise_sd = noise;
  return hp;
}

ParamBounds UnitBounds(int dim) {
  return {VectorXd::Zero(dim), VectorXd::Ones(dim)};
}

// Star discrepancy in 2-D by enumerating anchored boxes at point coordinates.
double StarDiscrepancy2d(const MatrixXd& p) {
  const int n = static_cast<int>(p.rows());
  std::vector<double> xs(n + 1), ys(n + 1);
  for (int i = 0; i < n; ++i) {
    xs[i] = p(i, 0);
    ys[i] = p(i, 1);
  }
  xs[n] = ys[n] = 1.0;
  double worst = 0.0;
  for (double u : xs) {
    for (double v : ys) {
      int open = 0, closed = 0;
      for (int i = 0; i < n; ++i) {
        open += p(i, 0) < u && p(i, 1) < v;
        closed += p(i, 0) <= u && p(i, 1) <= v;
      }
      worst = std::max({worst, u * v - static_cast<double>(open) / n,
                        static_cast<double>(closed) / n - u * v});
    }
  }
  return worst;
}

// 1-D model of a concave bump peaking at 0.37.
GpSurrogate BumpModel() {
  MatrixXd x(25, 1);
  VectorXd y(25);
  for (int i = 0; i < 25; ++i) {
    x(i, 0) = i / 24.0;
    y(i) = -10.0 * (x(i, 0) - 0.37) * (x(i, 0) - 0.37);
  }
  const auto s = Standardize(y);
  return GpSurrogate(x, s.values, Hyper(1, 0.3, 1.0, 1e-3), UnitBounds(1));
}

GpSurrogate RandomModel(int dim, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd x(8, dim);
  VectorXd y(8);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < dim; ++j) x(i, j) = u(rng);
    y(i) = g(rng);
  }
  return GpSurrogate(x, y, Hyper(dim, 0.3, 1.0, 0.1), UnitBounds(dim));
}

}  // namespace

TEST_CASE("sobol batches") {
  ParamBounds b{VectorXd::Constant(3, -100.0), VectorXd::Zero(3)};
  const MatrixXd pts = SobolBatch(b, 10, 77);
  CHECK(pts.rows() == 10);
  CHECK(pts.cols() == 3);
  CHECK(pts.minCoeff() >= -100.0);
  CHECK(pts.maxCoeff() <= 0.0);
  CHECK(SobolBatch(b, 10, 77) == pts);
  CHECK(SobolBatch(b, 10, 78) != pts);
  // Prefix property: fewer points are the head of the same sequence.
  CHECK(SobolBatch(b, 4, 77) == pts.topRows(4));
}

TEST_CASE("sobol beats uniform random on star discrepancy") {
  int wins = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const MatrixXd sobol = SobolUnit(256, 2, seed);
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MatrixXd rand(256, 2);
    for (Eigen::Index i = 0; i < rand.size(); ++i) rand(i) = u(rng);
    wins += StarDiscrepancy2d(sobol) < StarDiscrepancy2d(rand);
  }
  CHECK(wins >= 18);
}

TEST_CASE("single-point qEI matches analytic EI") {
  Rng rng(1);
  const auto model = RandomModel(2, rng);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    MatrixXd x(1, 2);
    x << u(rng), u(rng);
    const auto [mean, var] = model.MeanVariance(x);
    // Threshold near the predictive mean so the improvement has real mass.
    const double best_f = mean(0) + (trial - 5) * 0.1 * std::sqrt(var(0));
    const auto est = QeiWithSamples(model, x, best_f, QeiBaseSamples(4096, 1, trial));
    const double exact = AnalyticEi(mean(0), std::sqrt(var(0)), best_f);
    REQUIRE(est.std_error > 0.0);
    CHECK(std::abs(est.value - exact) <= 3.0 * est.std_error);
  }
  CHECK(AnalyticEi(1.0, 0.0, 0.5) == 0.5);
  CHECK(AnalyticEi(0.0, 0.0, 0.5) == 0.0);
}

TEST_CASE("qEI at an interpolated optimum is zero") {
  MatrixXd x(5, 1);
  x << 0.1, 0.3, 0.5, 0.7, 0.9;
  VectorXd y(5);
  y << 0.0, 1.0, 2.0, 0.5, -1.0;
  GpSurrogate model(x, y, Hyper(1, 0.2, 1.0, 1e-5), UnitBounds(1));
  MatrixXd batch(2, 1);
  batch << 0.5, 0.5;
  CHECK(Qei(model, batch, 2.0, 2048, 3) < 1e-4);
}

TEST_CASE("property: qEI is nonnegative, deterministic and monotone in the batch") {
  Rng rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const auto model = RandomModel(2, rng);
    const MatrixXd base = QeiBaseSamples(256, 4, trial);
    MatrixXd batch(4, 2);
    for (Eigen::Index i = 0; i < batch.size(); ++i) batch(i) = u(rng);
    const double best_f = model.y().maxCoeff();
    double prev = -1.0;
    for (int q = 1; q <= 4; ++q) {
      const double v = QeiWithSamples(model, batch.topRows(q), best_f, base).value;
      REQUIRE(v >= 0.0);
      REQUIRE(v >= prev - 1e-12);
      REQUIRE(v == QeiWithSamples(model, batch.topRows(q), best_f, base).value);
      prev = v;
    }
  }
}

TEST_CASE("optimize_qei") {
  SUBCASE("finds the posterior peak of a sharp 1-D model") {
    const auto model = BumpModel();
    double peak = 0.0, best = -1e300;
    MatrixXd grid(10000, 1);
    for (int i = 0; i < 10000; ++i) grid(i, 0) = i / 9999.0;
    const VectorXd mean = model.MeanVariance(grid).first;
    for (int i = 0; i < 10000; ++i) {
      if (mean(i) > best) {
        best = mean(i);
        peak = grid(i, 0);
      }
    }
    const auto res = OptimizeQei(model, SearchBox::UnitCube(1), 1, model.y().maxCoeff(),
                                 {.seed = 4});
    CHECK(std::abs(res.points(0, 0) - peak) < 0.05);
  }
  SUBCASE("collapsed box returns copies of its point") {
    Rng rng(3);
    const auto model = RandomModel(2, rng);
    SearchBox box{VectorXd::Constant(2, 0.25), VectorXd::Constant(2, 0.25)};
    const auto res = OptimizeQei(model, box, 3, 0.0, {.n_raw = 16, .seed = 1});
    CHECK(res.points.rows() == 3);
    CHECK((res.points.array() - 0.25).abs().maxCoeff() == 0.0);
  }
  SUBCASE("property: refinement never regresses and stays in the box") {
    Rng rng(5);
    for (int trial = 0; trial < 8; ++trial) {
      const auto model = RandomModel(3, rng);
      SearchBox box{VectorXd::Constant(3, 0.2), VectorXd::Constant(3, 0.6)};
      box.upper(1) = 0.9;
      const auto res = OptimizeQei(model, box, 2, model.y().maxCoeff(),
                                   {.n_mc = 128, .n_restarts = 2, .n_raw = 32,
                                    .max_evaluations = 200, .seed = 10u + trial});
      REQUIRE(res.value >= res.raw_best_value);
      for (int i = 0; i < res.points.rows(); ++i) {
        REQUIRE(box.Contains(res.points.row(i).transpose()));
      }
    }
  }
  SUBCASE("deterministic for a fixed seed") {
    Rng rng(6);
    const auto model = RandomModel(2, rng);
    const QeiOptions opts{.n_mc = 128, .n_raw = 32, .max_evaluations = 200, .seed = 9};
    const auto a = OptimizeQei(model, SearchBox::UnitCube(2), 2, 0.5, opts);
    const auto b = OptimizeQei(model, SearchBox::UnitCube(2), 2, 0.5, opts);
    CHECK(a.points == b.points);
    CHECK(a.value == b.value);
  }
}

TEST_CASE("turbo_update") {
  auto tr = TrustRegionState::Initial(VectorXd::Constant(2, 0.5));
  CHECK(tr.length == 0.8);
  CHECK(tr.fail_tol == 3);
  CHECK(TrustRegionState::Initial(VectorXd::Zero(5)).fail_tol == 5);
  SUBCASE("tolerances not reached") {
    tr = TurboUpdate(tr, 2.0, 1.0);
    tr = TurboUpdate(tr, 3.0, 2.0);
    tr = TurboUpdate(tr, 1.0, 3.0);
    CHECK(tr.length == 0.8);
    CHECK(tr.succ_count == 0);
    CHECK(tr.fail_count == 1);
  }
  SUBCASE("three successes double the edge up to the cap") {
    for (int i = 0; i < 3; ++i) tr = TurboUpdate(tr, i + 1.0, i);
    CHECK(tr.length == 1.6);
    CHECK(tr.succ_count == 0);
    for (int i = 0; i < 3; ++i) tr = TurboUpdate(tr, i + 1.0, i);
    CHECK(tr.length == 1.6);
  }
  SUBCASE("ties count as failures") {
    tr = TurboUpdate(tr, 1.0, 1.0);
    CHECK(tr.fail_count == 1);
  }
  SUBCASE("halving schedule and restart") {
    tr.fail_tol = 2;
    tr.l_min = 0.01;
    const double expected[] = {0.8, 0.4, 0.4, 0.2, 0.2, 0.1, 0.1, 0.05,
                               0.05, 0.025, 0.025, 0.0125, 0.0125};
    for (int i = 0; i < 13; ++i) {
      tr = TurboUpdate(tr, 0.0, 1.0);
      REQUIRE(tr.length == doctest::Approx(expected[i]));
    }
    CHECK(tr.restarts == 0);
    tr = TurboUpdate(tr, 0.0, 1.0);
    CHECK(tr.length == 0.8);
    CHECK(tr.restarts == 1);
    CHECK(tr.fail_count == 0);
    CHECK(tr.center == VectorXd::Constant(2, 0.5));
  }
}

TEST_CASE("turbo_bounds") {
  SUBCASE("isotropic box around the center") {
    auto tr = TrustRegionState::Initial(VectorXd::Constant(3, 0.5));
    const auto box = TurboBounds(tr, VectorXd::Constant(3, 0.2));
    CHECK((box.lower.array() - 0.1).abs().maxCoeff() < 1e-12);
    CHECK((box.upper.array() - 0.9).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("corner center is clipped to the cube") {
    auto tr = TrustRegionState::Initial(VectorXd::Ones(2));
    const auto box = TurboBounds(tr, VectorXd::Constant(2, 0.5));
    CHECK(box.upper == VectorXd::Ones(2));
    CHECK((box.lower.array() - 0.6).abs().maxCoeff() < 1e-12);
  }
  SUBCASE("anisotropic widths keep the volume") {
    auto tr = TrustRegionState::Initial(VectorXd::Constant(2, 0.5));
    tr.length = 0.4;
    VectorXd ls(2);
    ls << 0.6, 0.3;
    const auto box = TurboBounds(tr, ls);
    const VectorXd width = box.upper - box.lower;
    CHECK(width(0) > 0.4);
    CHECK(width(1) < 0.4);
    CHECK(width.prod() == doctest::Approx(0.4 * 0.4));
    CHECK(width(0) / width(1) == doctest::Approx(2.0));
  }
}

TEST_CASE("global mode equals a trust region covering the cube") {
  Rng rng(7);
  const auto model = RandomModel(2, rng);
  auto tr = TrustRegionState::Initial(VectorXd::Constant(2, 0.5));
  tr.length = tr.l_max;
  const SearchBox full = TurboBounds(tr, VectorXd::Constant(2, 0.3));
  REQUIRE(full.lower == VectorXd::Zero(2));
  REQUIRE(full.upper == VectorXd::Ones(2));
  const QeiOptions opts{.n_mc = 128, .n_raw = 32, .max_evaluations = 200, .seed = 2};
  const auto a = OptimizeQei(model, SearchBox::UnitCube(2), 2, 0.3, opts);
  const auto b = OptimizeQei(model, full, 2, 0.3, opts);
  CHECK(a.points == b.points);
  CHECK(a.value == b.value);
}

}  // namespace bots
