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

// The predictive-model contract shared by every estimator: fit on a feature
// matrix and binary labels, then return P(label = 1) for new rows.

#ifndef ATEBENCH_MODELS_H_
#define ATEBENCH_MODELS_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atebench/dataset.h"

namespace atebench {

// Row-major real matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  FeatureMatrix() = default;
  FeatureMatrix(std::size_t r, std::size_t c)
      : rows(r), cols(c), values(r * c, 0.0) {}

  double operator()(std::size_t r, std::size_t c) const {
    return values[r * cols + c];
  }
  double& operator()(std::size_t r, std::size_t c) {
    return values[r * cols + c];
  }
  std::span<const double> row(std::size_t r) const {
    return {values.data() + r * cols, cols};
  }

  // Throws ModelError on a shape mismatch or a non-finite entry.
  void Validate() const;
};

using Labels = std::span<const std::uint8_t>;

enum class ModelKind { kLogistic, kBoostedTrees, kExternal, kOther };

struct ModelDiagnostics {
  bool converged = true;
  int iterations = 0;
  bool separation = false;
  std::string message;
};

class FittedModel {
 public:
  virtual ~FittedModel() = default;

  virtual ModelKind kind() const = 0;
  virtual std::size_t num_features() const = 0;

  // P(label = 1 | row) for each row of X. Throws ModelError when the column
  // count differs from the one seen at fit time.
  std::vector<double> PredictProba(const FeatureMatrix& X) const;

  const ModelDiagnostics& diagnostics() const { return diagnostics_; }

 protected:
  virtual std::vector<double> PredictImpl(const FeatureMatrix& X) const = 0;

  ModelDiagnostics diagnostics_;
};

// Fits a fresh model. Must be safe to call from several threads at once.
using ModelFactory = std::function<std::unique_ptr<FittedModel>(
    const FeatureMatrix& X, Labels y)>;

// Outcome-model layout [x, z_1..z_d]. With `treatment` set, the x column is
// overwritten with that value for every row (counterfactual prediction).
FeatureMatrix OutcomeFeatures(const SimulatedDataset& d,
                              std::optional<std::uint8_t> treatment = {});

// Propensity / per-arm layout [z_1..z_d].
FeatureMatrix ConfounderFeatures(const SimulatedDataset& d);

// Distinct (feature row, label) patterns with their multiplicities, in
// lexicographic order. Both in-process learners fit on this compressed form;
// with binary confounders a dataset of n rows collapses to at most
// 2^(d+2) patterns and the weighted likelihood is unchanged.
struct PatternTable {
  FeatureMatrix features;
  std::vector<double> labels;
  std::vector<double> counts;
};
PatternTable CompressPatterns(const FeatureMatrix& X, Labels y);

}  // namespace atebench

#endif  // ATEBENCH_MODELS_H_
