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

#ifndef ATEBENCH_LOGISTIC_H_
#define ATEBENCH_LOGISTIC_H_

#include <memory>
#include <optional>
#include <vector>

#include "atebench/models.h"

namespace atebench {

struct LogisticOptions {
  int max_iterations = 25;
  double deviance_tolerance = 1e-8;
  // Any |coefficient| above this marks the fit as (quasi-)separated.
  double separation_threshold = 15.0;
  // Clamp predictions to [eps, 1-eps]. Off unless set.
  std::optional<double> clip_epsilon;
};

// Main-effects logistic regression with intercept.
class LogisticModel final : public FittedModel {
 public:
  LogisticModel(std::vector<double> coefficients, ModelDiagnostics diagnostics,
                std::optional<double> clip_epsilon = {});

  ModelKind kind() const override { return ModelKind::kLogistic; }
  std::size_t num_features() const override { return coefficients_.size() - 1; }

  // Intercept first, then one coefficient per feature column.
  const std::vector<double>& coefficients() const { return coefficients_; }
  double deviance() const { return deviance_; }

 private:
  friend std::unique_ptr<LogisticModel> FitLogistic(const FeatureMatrix&,
                                                    Labels,
                                                    const LogisticOptions&);
  std::vector<double> PredictImpl(const FeatureMatrix& X) const override;

  std::vector<double> coefficients_;
  std::optional<double> clip_epsilon_;
  double deviance_ = 0.0;
};

// Maximum likelihood by iteratively reweighted least squares, starting from
// zero. Stops when |change in deviance| < tolerance or after max_iterations.
// A rank-deficient design throws ModelError naming the dependent columns;
// separation returns the last iterate with diagnostics().separation set.
std::unique_ptr<LogisticModel> FitLogistic(const FeatureMatrix& X, Labels y,
                                           const LogisticOptions& opts = {});

ModelFactory LogisticFactory(LogisticOptions opts = {});

// Numerically stable 1 / (1 + exp(-t)).
double Sigmoid(double t);

}  // namespace atebench

#endif  // ATEBENCH_LOGISTIC_H_
