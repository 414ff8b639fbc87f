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

#include "bots/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <boost/random/sobol.hpp>

#include "bots/errors.hpp"
#include "bots/random.hpp"

namespace bots {
namespace {

// Lower factor of a (possibly singular) covariance. Falls back to a
// symmetric square root when jitter cannot rescue the Cholesky.
MatrixXd CovarianceFactor(const MatrixXd& cov) {
  static constexpr double kLadder[] = {0.0, 1e-10, 1e-8, 1e-6};
  const double scale = std::max(1.0, cov.diagonal().maxCoeff());
  for (double jitter : kLadder) {
    MatrixXd c = cov;
    c.diagonal().array() += jitter * scale;
    Eigen::LLT<MatrixXd> llt(c);
    if (llt.info() == Eigen::Success) return llt.matrixL();
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
  const VectorXd root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal();
}

MatrixXd Unflatten(const VectorXd& v, Eigen::Index q, Eigen::Index dim) {
  MatrixXd batch(q, dim);
  for (Eigen::Index r = 0; r < q; ++r) {
    batch.row(r) = v.segment(r * dim, dim).transpose();
  }
  return batch;
}

}  // namespace

SearchBox SearchBox::UnitCube(int dim) {
  return {VectorXd::Zero(dim), VectorXd::Ones(dim)};
}

bool SearchBox::Contains(const VectorXd& u, double tol) const {
  return ((u - lower).array() >= -tol).all() &&
         ((upper - u).array() >= -tol).all();
}

MatrixXd SobolUnit(int n, int dim, std::uint64_t seed) {
  if (n < 1 || dim < 1) throw InvalidInput("Sobol needs n >= 1 and dim >= 1");
  boost::random::sobol engine(static_cast<std::size_t>(dim));
  Rng rng(seed);
  std::vector<std::uint64_t> shift(dim);
  for (auto& s : shift) s = rng();
  MatrixXd u(n, dim);
  constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
  for (int i = 0; i < n; ++i) {
    for (int d = 0; d < dim; ++d) {
      const std::uint64_t v = static_cast<std::uint64_t>(engine()) ^ shift[d];
      u(i, d) = static_cast<double>(v >> 11) * kScale;
    }
  }
  return u;
}

MatrixXd SobolBatch(const ParamBounds& bounds, int n, std::uint64_t seed) {
  bounds.Validate();
  return bounds.FromUnit(SobolUnit(n, bounds.dim(), seed));
}

MatrixXd QeiBaseSamples(int n_mc, int q, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  MatrixXd z(n_mc, q);
  for (int i = 0; i < n_mc; ++i) {
    for (int j = 0; j < q; ++j) z(i, j) = normal(rng);
  }
  return z;
}

QeiEstimate QeiWithSamples(const GpSurrogate& model, const MatrixXd& batch,
                           double best_f, const MatrixXd& base_samples) {
  const auto q = batch.rows();
  if (q < 1) throw InvalidInput("qEI needs at least one point");
  if (base_samples.cols() < q) {
    throw InvalidInput("not enough base-sample columns for the batch");
  }
  const auto pred = model.Posterior(batch);
  const MatrixXd factor = CovarianceFactor(pred.cov);
  // Row i holds one joint draw of the latent values at the batch points.
  MatrixXd draws = base_samples.leftCols(q) * factor.transpose();
  draws.rowwise() += pred.mean.transpose();
  const VectorXd improvement =
      (draws.rowwise().maxCoeff().array() - best_f).max(0.0).matrix();
  const double n = static_cast<double>(improvement.size());
  QeiEstimate est;
  est.value = improvement.mean();
  if (improvement.size() > 1) {
    const double var =
        (improvement.array() - est.value).square().sum() / (n - 1.0);
    est.std_error = std::sqrt(var / n);
  }
  return est;
}

double Qei(const GpSurrogate& model, const MatrixXd& batch, double best_f,
           int n_mc, std::uint64_t base_seed) {
  return QeiWithSamples(model, batch, best_f,
                        QeiBaseSamples(n_mc, static_cast<int>(batch.rows()),
                                       base_seed))
      .value;
}

double AnalyticEi(double mean, double sd, double best_f) {
  if (!(sd > 0.0)) return std::max(0.0, mean - best_f);
  const double z = (mean - best_f) / sd;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return sd * pdf + (mean - best_f) * cdf;
}

QeiResult OptimizeQei(const GpSurrogate& model, const SearchBox& box, int q,
                      double best_f, const QeiOptions& opts) {
  const int dim = model.dim();
  if (q < 1) throw InvalidInput("batch size must be at least 1");
  if (box.dim() != dim) throw InvalidInput("search box dimension mismatch");

  const MatrixXd base = QeiBaseSamples(opts.n_mc, q, opts.seed);
  const VectorXd lo = box.lower.replicate(q, 1);
  const VectorXd hi = box.upper.replicate(q, 1);
  const VectorXd width = hi - lo;

  QeiResult result;
  auto evaluate = [&](const VectorXd& flat) {
    ++result.evaluations;
    return QeiWithSamples(model, Unflatten(flat, q, dim), best_f, base).value;
  };

  // Raw joint batches: Sobol in q * dim dimensions scaled into the box.
  const MatrixXd raw =
      SobolUnit(opts.n_raw, q * dim, opts.seed ^ 0x5eedULL);
  std::vector<std::pair<double, VectorXd>> scored;
  scored.reserve(raw.rows());
  for (Eigen::Index r = 0; r < raw.rows(); ++r) {
    VectorXd flat = lo + raw.row(r).transpose().cwiseProduct(width);
    const double v = evaluate(flat);
    scored.emplace_back(v, std::move(flat));
  }
  // Stable order keeps ties deterministic.
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  result.raw_best_value = scored.front().first;

  VectorXd best_flat = scored.front().second;
  double best_value = scored.front().first;
  const int restarts =
      std::min<int>(opts.n_restarts, static_cast<int>(scored.size()));
  for (int r = 0; r < restarts; ++r) {
    VectorXd x = scored[r].second;
    double fx = scored[r].first;
    double step = opts.initial_step;
    int budget = opts.max_evaluations;
    while (step >= opts.min_step && budget > 0) {
      bool improved = false;
      for (Eigen::Index i = 0; i < x.size() && budget > 0; ++i) {
        if (width(i) <= 0.0) continue;
        for (double sign : {1.0, -1.0}) {
          VectorXd trial = x;
          trial(i) = std::clamp(x(i) + sign * step * width(i), lo(i), hi(i));
          if (trial(i) == x(i)) continue;
          const double ft = evaluate(trial);
          --budget;
          if (ft > fx) {
            x = std::move(trial);
            fx = ft;
            improved = true;
            break;
          }
        }
      }
      if (!improved) step *= 0.5;
    }
    ++result.restarts;
    if (fx > best_value) {
      best_value = fx;
      best_flat = x;
    }
  }
  result.points = Unflatten(best_flat, q, dim);
  result.value = best_value;
  return result;
}

TrustRegionState TrustRegionState::Initial(VectorXd center) {
  TrustRegionState tr;
  tr.fail_tol = std::max<int>(3, static_cast<int>(center.size()));
  tr.center = std::move(center);
  return tr;
}

TrustRegionState TurboUpdate(TrustRegionState tr, double batch_best_return,
                             double incumbent_return) {
  if (batch_best_return > incumbent_return) {
    ++tr.succ_count;
    tr.fail_count = 0;
  } else {
    ++tr.fail_count;
    tr.succ_count = 0;
  }
  if (tr.succ_count == tr.succ_tol) {
    tr.length = std::min(2.0 * tr.length, tr.l_max);
    tr.succ_count = 0;
  } else if (tr.fail_count == tr.fail_tol) {
    tr.length /= 2.0;
    tr.fail_count = 0;
  }
  if (tr.length < tr.l_min) {
    tr.length = tr.l_init;
    tr.succ_count = 0;
    tr.fail_count = 0;
    ++tr.restarts;
  }
  return tr;
}

SearchBox TurboBounds(const TrustRegionState& tr, const VectorXd& lengthscale) {
  if (lengthscale.size() != tr.center.size()) {
    throw InvalidInput("lengthscale dimension does not match trust region");
  }
  const double geo_mean =
      std::exp(lengthscale.array().log().mean());
  const VectorXd half = 0.5 * tr.length * lengthscale / geo_mean;
  SearchBox box;
  box.lower = (tr.center - half).cwiseMax(0.0).cwiseMin(1.0);
  box.upper = (tr.center + half).cwiseMax(0.0).cwiseMin(1.0);
  return box;
}

nlohmann::json ToJson(const TrustRegionState& tr) {
  return {{"center", std::vector<double>(tr.center.data(),
                                         tr.center.data() + tr.center.size())},
          {"length", tr.length},
          {"succ_count", tr.succ_count},
          {"fail_count", tr.fail_count},
          {"succ_tol", tr.succ_tol},
          {"fail_tol", tr.fail_tol},
          {"restarts", tr.restarts}};
}

}  // namespace bots
