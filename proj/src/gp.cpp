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

#include "bots/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "bots/bfgs.hpp"
#include "bots/errors.hpp"
#include "bots/random.hpp"

namespace bots {
namespace {

constexpr double kSqrt5 = 2.23606797749978969640;
constexpr double kLogBound = 9.0;  // hyperparameters stay within e^{+-9}

// Matern 5/2 profile for a scaled distance r.
double MaternProfile(double r) {
  return (1.0 + kSqrt5 * r + 5.0 / 3.0 * r * r) * std::exp(-kSqrt5 * r);
}

double LogGammaDensity(double x, double shape, double rate) {
  return shape * std::log(rate) - std::lgamma(shape) +
         (shape - 1.0) * std::log(x) - rate * x;
}

}  // namespace

void ParamBounds::Validate() const {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InvalidInput("bounds must have matching, non-zero dimension");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower(i) < upper(i))) {
      throw InvalidInput("bounds require lower < upper in every dimension");
    }
  }
}

MatrixXd ParamBounds::ToUnit(const MatrixXd& x) const {
  const VectorXd width = upper - lower;
  MatrixXd u = x;
  for (Eigen::Index r = 0; r < u.rows(); ++r) {
    u.row(r) = ((x.row(r).transpose() - lower).array() / width.array())
                   .transpose();
  }
  return u;
}

MatrixXd ParamBounds::FromUnit(const MatrixXd& u) const {
  const VectorXd width = upper - lower;
  MatrixXd x = u;
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    x.row(r) =
        (lower.array() + u.row(r).transpose().array() * width.array())
            .transpose();
  }
  return x;
}

double Matern52(const VectorXd& x1, const VectorXd& x2,
                const VectorXd& lengthscale, double outputscale) {
  const double r = ((x1 - x2).array() / lengthscale.array()).matrix().norm();
  return outputscale * MaternProfile(r);
}

MatrixXd KernelMatrix(const MatrixXd& a, const MatrixXd& b,
                      const GpHyperparameters& hp) {
  const VectorXd inv_ls = hp.lengthscale.cwiseInverse();
  MatrixXd k(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      double r2 = 0.0;
      for (Eigen::Index d = 0; d < a.cols(); ++d) {
        const double diff = (a(i, d) - b(j, d)) * inv_ls(d);
        r2 += diff * diff;
      }
      k(i, j) = hp.outputscale * MaternProfile(std::sqrt(r2));
    }
  }
  return k;
}

GpSurrogate::GpSurrogate(MatrixXd x_unit, VectorXd y, GpHyperparameters hp,
                         ParamBounds bounds, double y_mean, double y_scale)
    : x_(std::move(x_unit)),
      y_(std::move(y)),
      hp_(std::move(hp)),
      bounds_(std::move(bounds)),
      y_mean_(y_mean),
      y_scale_(y_scale) {
  if (x_.rows() != y_.size()) {
    throw InvalidInput("GP inputs and targets disagree on count");
  }
  if (x_.cols() != hp_.lengthscale.size()) {
    throw InvalidInput("GP lengthscales do not match input dimension");
  }
  if (!(hp_.outputscale > 0.0) || !(hp_.noise_sd > 0.0) ||
      (hp_.lengthscale.array() <= 0.0).any()) {
    throw InvalidInput("GP hyperparameters must be positive");
  }
  MatrixXd k = KernelMatrix(x_, x_, hp_);
  k.diagonal().array() += hp_.noise_sd * hp_.noise_sd;
  static constexpr double kLadder[] = {0.0, 1e-8, 1e-7, 1e-6, 1e-5, 1e-4};
  for (double jitter : kLadder) {
    MatrixXd kj = k;
    kj.diagonal().array() += jitter;
    chol_.compute(kj);
    if (chol_.info() == Eigen::Success) {
      jitter_ = jitter;
      alpha_ = chol_.solve(y_);
      return;
    }
  }
  throw NumericalError("GP kernel matrix not positive definite after jitter");
}

GpSurrogate::Prediction GpSurrogate::Posterior(const MatrixXd& xq) const {
  Prediction out;
  const MatrixXd kqx = KernelMatrix(xq, x_, hp_);
  out.mean = kqx * alpha_;
  const MatrixXd v = chol_.matrixL().solve(kqx.transpose());
  out.cov = KernelMatrix(xq, xq, hp_);
  out.cov.noalias() -= v.transpose() * v;
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

std::pair<VectorXd, VectorXd> GpSurrogate::MeanVariance(
    const MatrixXd& xq) const {
  const MatrixXd kqx = KernelMatrix(xq, x_, hp_);
  VectorXd mean = kqx * alpha_;
  const MatrixXd v = chol_.matrixL().solve(kqx.transpose());
  VectorXd var = (hp_.outputscale - v.colwise().squaredNorm().array())
                     .max(0.0)
                     .matrix()
                     .transpose();
  return {std::move(mean), std::move(var)};
}

std::pair<VectorXd, VectorXd> GpSurrogate::PredictRaw(
    const MatrixXd& x_raw) const {
  auto [mean, var] = MeanVariance(bounds_.ToUnit(x_raw));
  mean = (mean.array() * y_scale_ + y_mean_).matrix();
  var *= y_scale_ * y_scale_;
  return {std::move(mean), std::move(var)};
}

double GpSurrogate::LogMarginalLikelihood() const {
  const double n = static_cast<double>(y_.size());
  const double log_det =
      2.0 * chol_.matrixLLT().diagonal().array().log().sum();
  return -0.5 * y_.dot(alpha_) - 0.5 * log_det -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

VectorXd GpSurrogate::LogMarginalLikelihoodGradient() const {
  const auto n = x_.rows();
  const auto dims = x_.cols();
  const MatrixXd k_inv = chol_.solve(MatrixXd::Identity(n, n));
  // W = alpha alpha^T - K^{-1}; dLML/dtheta = 0.5 * sum(W .* dK/dtheta).
  const MatrixXd w = alpha_ * alpha_.transpose() - k_inv;

  VectorXd grad = VectorXd::Zero(dims + 2);
  const VectorXd inv_ls = hp_.lengthscale.cwiseInverse();
  std::vector<double> scaled(dims);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (Eigen::Index d = 0; d < dims; ++d) {
        const double diff = (x_(i, d) - x_(j, d)) * inv_ls(d);
        scaled[d] = diff * diff;
        r2 += scaled[d];
      }
      const double r = std::sqrt(r2);
      const double e = std::exp(-kSqrt5 * r);
      const double kij = hp_.outputscale * (1.0 + kSqrt5 * r + 5.0 / 3.0 * r2) * e;
      // dk/dlog(l_d) = (5/3) s (1 + sqrt5 r) e^{-sqrt5 r} (x_d - x'_d)^2 / l_d^2
      const double radial = 5.0 / 3.0 * hp_.outputscale * (1.0 + kSqrt5 * r) * e;
      for (Eigen::Index d = 0; d < dims; ++d) {
        grad(d) += w(i, j) * radial * scaled[d];
      }
      grad(dims) += w(i, j) * kij;
    }
  }
  grad(dims + 1) = w.trace() * hp_.noise_sd * hp_.noise_sd;
  return 0.5 * grad;
}

Standardization Standardize(const VectorXd& y) {
  Standardization out;
  const double n = static_cast<double>(y.size());
  out.mean = y.mean();
  const double ss = (y.array() - out.mean).square().sum();
  const double sd = n > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  if (!(sd > 1e-12 * (1.0 + std::abs(out.mean)))) {
    out.scale = 1.0;
    out.values = VectorXd::Zero(y.size());
  } else {
    out.scale = sd;
    out.values = (y.array() - out.mean) / sd;
  }
  return out;
}

double LogPosteriorObjective(const GpSurrogate& model, const GpPriors& priors) {
  double value = model.LogMarginalLikelihood();
  for (Eigen::Index d = 0; d < model.hyper().lengthscale.size(); ++d) {
    value += LogGammaDensity(model.hyper().lengthscale(d),
                             priors.lengthscale_shape, priors.lengthscale_rate);
  }
  value += LogGammaDensity(model.hyper().outputscale, priors.outputscale_shape,
                           priors.outputscale_rate);
  return value;
}

GpSurrogate FitGp(const MatrixXd& x_raw, const VectorXd& y_raw,
                  const ParamBounds& bounds, const GpFitOptions& opts) {
  bounds.Validate();
  if (x_raw.rows() < 2) {
    throw InvalidInput("GP fit needs at least two observations");
  }
  if (x_raw.rows() != y_raw.size() || x_raw.cols() != bounds.dim()) {
    throw InvalidInput("GP data does not match bounds dimension");
  }
  if (!x_raw.allFinite() || !y_raw.allFinite()) {
    throw InvalidInput("GP data must be finite");
  }
  const MatrixXd x_unit = bounds.ToUnit(x_raw);
  const Standardization st = Standardize(y_raw);
  const int dims = bounds.dim();
  const GpPriors& pr = opts.priors;

  // Free variables: log lengthscales, log outputscale, log(noise_sd - min).
  auto decode = [&](const VectorXd& z) {
    GpHyperparameters hp;
    hp.lengthscale = z.head(dims).array().exp();
    hp.outputscale = std::exp(z(dims));
    hp.noise_sd = pr.noise_sd_min + std::exp(z(dims + 1));
    return hp;
  };
  auto encode = [&](const GpHyperparameters& hp) {
    VectorXd z(dims + 2);
    z.head(dims) = hp.lengthscale.array().log();
    z(dims) = std::log(hp.outputscale);
    z(dims + 1) = std::log(std::max(hp.noise_sd - pr.noise_sd_min, 1e-12));
    return z;
  };

  auto objective = [&](const VectorXd& z, VectorXd& grad) -> double {
    const GpHyperparameters hp = decode(z);
    try {
      const GpSurrogate model(x_unit, st.values, hp, bounds, st.mean, st.scale);
      const VectorXd g = model.LogMarginalLikelihoodGradient();
      grad.resize(dims + 2);
      for (int d = 0; d < dims; ++d) {
        grad(d) = g(d) + (pr.lengthscale_shape - 1.0) -
                  pr.lengthscale_rate * hp.lengthscale(d);
      }
      grad(dims) = g(dims) + (pr.outputscale_shape - 1.0) -
                   pr.outputscale_rate * hp.outputscale;
      // d log(noise var) / dz = 2 e^z / (min + e^z)
      const double ez = std::exp(z(dims + 1));
      grad(dims + 1) = g(dims + 1) * 2.0 * ez / (pr.noise_sd_min + ez);
      grad = -grad;
      return -LogPosteriorObjective(model, pr);
    } catch (const NumericalError&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::vector<GpHyperparameters> starts;
  GpHyperparameters init;
  init.lengthscale = VectorXd::Constant(dims, pr.lengthscale_shape / pr.lengthscale_rate);
  init.outputscale = 1.0;
  init.noise_sd = pr.noise_sd_init;
  starts.push_back(init);
  Rng rng(opts.seed);
  std::gamma_distribution<double> ls_prior(pr.lengthscale_shape,
                                           1.0 / pr.lengthscale_rate);
  std::gamma_distribution<double> os_prior(pr.outputscale_shape,
                                           1.0 / pr.outputscale_rate);
  std::uniform_real_distribution<double> log_noise(std::log(0.01), std::log(1.0));
  for (int s = 0; s < opts.n_random_starts; ++s) {
    GpHyperparameters hp;
    hp.lengthscale.resize(dims);
    for (int d = 0; d < dims; ++d) hp.lengthscale(d) = std::max(ls_prior(rng), 1e-3);
    hp.outputscale = std::max(os_prior(rng), 1e-3);
    hp.noise_sd = std::exp(log_noise(rng));
    starts.push_back(hp);
  }

  VectorXd lower = VectorXd::Constant(dims + 2, -kLogBound);
  VectorXd upper = VectorXd::Constant(dims + 2, kLogBound);
  lower(dims + 1) = std::log(1e-12);

  BfgsResult best;
  for (const auto& start : starts) {
    BfgsResult res = MinimizeBfgs(objective, encode(start), lower, upper);
    if (res.value < best.value) best = std::move(res);
  }
  if (!std::isfinite(best.value)) {
    throw NumericalError("GP hyperparameter search found no feasible point");
  }
  return GpSurrogate(x_unit, st.values, decode(best.x), bounds, st.mean,
                     st.scale);
}

nlohmann::json ToJson(const GpSurrogate& model) {
  auto vec = [](const VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index r = 0; r < model.x().rows(); ++r) {
    rows.push_back(vec(model.x().row(r).transpose()));
  }
  return {{"lengthscale", vec(model.hyper().lengthscale)},
          {"outputscale", model.hyper().outputscale},
          {"noise_sd", model.hyper().noise_sd},
          {"x_unit", std::move(rows)},
          {"y_standardized", vec(model.y())},
          {"y_mean", model.y_mean()},
          {"y_scale", model.y_scale()},
          {"lower", vec(model.bounds().lower)},
          {"upper", vec(model.bounds().upper)}};
}

GpSurrogate SurrogateFromJson(const nlohmann::json& j) {
  auto vec = [](const nlohmann::json& a) {
    const auto v = a.get<std::vector<double>>();
    return VectorXd(Eigen::Map<const VectorXd>(v.data(),
                                               static_cast<Eigen::Index>(v.size())));
  };
  GpHyperparameters hp;
  hp.lengthscale = vec(j.at("lengthscale"));
  hp.outputscale = j.at("outputscale").get<double>();
  hp.noise_sd = j.at("noise_sd").get<double>();
  ParamBounds bounds{vec(j.at("lower")), vec(j.at("upper"))};
  const auto& rows = j.at("x_unit");
  MatrixXd x(static_cast<Eigen::Index>(rows.size()), hp.lengthscale.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = vec(rows[r]).transpose();
  }
  return GpSurrogate(std::move(x), vec(j.at("y_standardized")), std::move(hp),
                     std::move(bounds), j.at("y_mean").get<double>(),
                     j.at("y_scale").get<double>());
}

}  // namespace bots
