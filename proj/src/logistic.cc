/*
 * Copyright 2026 The atebench Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "atebench/logistic.h"

#include <fmt/format.h>

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "atebench/errors.h"

namespace atebench {
namespace {

// log(1 + exp(t)) without overflow.
double Softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

// Binomial deviance for weighted patterns at linear predictor `eta`.
double Deviance(const Eigen::VectorXd& eta, const Eigen::VectorXd& y,
                const Eigen::VectorXd& counts) {
  double dev = 0.0;
  for (Eigen::Index i = 0; i < eta.size(); ++i) {
    // -log p = softplus(-eta), -log(1-p) = softplus(eta)
    dev += counts[i] * (y[i] > 0.5 ? Softplus(-eta[i]) : Softplus(eta[i]));
  }
  return 2.0 * dev;
}

void CheckRank(const Eigen::MatrixXd& design) {
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
  const Eigen::Index rank = qr.rank();
  if (rank == design.cols()) return;
  std::vector<Eigen::Index> dependent;
  for (Eigen::Index k = rank; k < design.cols(); ++k) {
    dependent.push_back(qr.colsPermutation().indices()[k]);
  }
  std::sort(dependent.begin(), dependent.end());
  std::string names;
  for (const auto c : dependent) {
    if (!names.empty()) names += ", ";
    names += c == 0 ? std::string("intercept") : fmt::format("feature {}", c - 1);
  }
  std::string constant;
  for (Eigen::Index c = 1; c < design.cols(); ++c) {
    if ((design.col(c).array() == design(0, c)).all()) {
      constant += fmt::format(" feature {} is constant;", c - 1);
    }
  }
  throw ModelError(fmt::format(
      "singular weighted normal equations: design rank {} < {} columns; "
      "collinear: {}.{}",
      rank, design.cols(), names, constant));
}

}  // namespace

double Sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

LogisticModel::LogisticModel(std::vector<double> coefficients,
                             ModelDiagnostics diagnostics,
                             std::optional<double> clip_epsilon)
    : coefficients_(std::move(coefficients)), clip_epsilon_(clip_epsilon) {
  if (coefficients_.empty()) throw ModelError("logistic model needs an intercept");
  diagnostics_ = std::move(diagnostics);
}

std::vector<double> LogisticModel::PredictImpl(const FeatureMatrix& X) const {
  std::vector<double> out(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) {
    double eta = coefficients_[0];
    const auto r = X.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) eta += coefficients_[j + 1] * r[j];
    double p = Sigmoid(eta);
    if (clip_epsilon_) p = std::clamp(p, *clip_epsilon_, 1.0 - *clip_epsilon_);
    out[i] = p;
  }
  return out;
}

std::unique_ptr<LogisticModel> FitLogistic(const FeatureMatrix& X, Labels y,
                                           const LogisticOptions& opts) {
  X.Validate();
  if (X.rows == 0) throw ModelError("cannot fit logistic regression on 0 rows");
  for (const auto label : y) {
    if (label > 1) throw ModelError("labels must be 0/1");
  }
  const PatternTable patterns = CompressPatterns(X, y);
  const auto m = static_cast<Eigen::Index>(patterns.features.rows);
  const auto p = static_cast<Eigen::Index>(X.cols + 1);

  Eigen::MatrixXd design(m, p);
  Eigen::VectorXd labels(m), counts(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    design(i, 0) = 1.0;
    for (Eigen::Index j = 1; j < p; ++j) {
      design(i, j) = patterns.features(static_cast<std::size_t>(i),
                                       static_cast<std::size_t>(j - 1));
    }
    labels[i] = patterns.labels[static_cast<std::size_t>(i)];
    counts[i] = patterns.counts[static_cast<std::size_t>(i)];
  }
  CheckRank(design);

  Eigen::VectorXd beta = Eigen::VectorXd::Zero(p);
  Eigen::VectorXd eta = design * beta;
  double deviance = Deviance(eta, labels, counts);
  ModelDiagnostics diag;
  diag.converged = false;

  Eigen::VectorXd mu(m), weights(m);
  for (int iter = 1; iter <= opts.max_iterations; ++iter) {
    for (Eigen::Index i = 0; i < m; ++i) {
      mu[i] = Sigmoid(eta[i]);
      weights[i] = counts[i] * mu[i] * (1.0 - mu[i]);
    }
    const Eigen::VectorXd score =
        design.transpose() * (counts.array() * (labels - mu).array()).matrix();
    const Eigen::MatrixXd information =
        design.transpose() * weights.asDiagonal() * design;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(information);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        (ldlt.vectorD().array() <= 0.0).any()) {
      // Weights collapsed to zero: fitted probabilities are numerically 0/1.
      diag.message = "information matrix lost definiteness (separation)";
      diag.separation = true;
      break;
    }
    const Eigen::VectorXd step = ldlt.solve(score);
    if (!step.allFinite()) {
      diag.message = "non-finite IRLS step";
      diag.separation = true;
      break;
    }
    beta += step;
    eta = design * beta;
    const double next = Deviance(eta, labels, counts);
    diag.iterations = iter;
    const double change = std::abs(next - deviance);
    deviance = next;
    if (change < opts.deviance_tolerance) {
      diag.converged = true;
      break;
    }
  }
  if (beta.cwiseAbs().maxCoeff() > opts.separation_threshold) {
    diag.separation = true;
    if (diag.message.empty()) {
      diag.message = fmt::format("|coefficient| {:.3g} exceeds {} (quasi-separation)",
                                 beta.cwiseAbs().maxCoeff(),
                                 opts.separation_threshold);
    }
  }
  std::vector<double> coefficients(beta.data(), beta.data() + p);
  auto model = std::make_unique<LogisticModel>(std::move(coefficients),
                                               std::move(diag), opts.clip_epsilon);
  model->deviance_ = deviance;
  return model;
}

ModelFactory LogisticFactory(LogisticOptions opts) {
  return [opts](const FeatureMatrix& X, Labels y) -> std::unique_ptr<FittedModel> {
    return FitLogistic(X, y, opts);
  };
}

}  // namespace atebench
