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

// ATE point estimators and the glue that turns a spec such as
// "iptw+logistic" into something the bootstrap and harness can run.
//
// Failures are typed: EmptyArmError when a treatment arm has no rows,
// InfiniteWeightError for a fitted propensity of exactly 0 or 1, ModelError
// for fit failures. None of them are swallowed here.

#ifndef ATEBENCH_ESTIMATORS_H_
#define ATEBENCH_ESTIMATORS_H_

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "atebench/bootstrap.h"
#include "atebench/boosted_trees.h"
#include "atebench/dataset.h"
#include "atebench/external_model.h"
#include "atebench/logistic.h"
#include "atebench/models.h"
#include "atebench/result.h"

namespace atebench {

enum class Strategy { kCrude, kGcomp, kGcompTwoModel, kIptw, kExternalDirect };
enum class ModelChoice { kNone, kLogistic, kBoostedTrees, kExternal };

std::string_view StrategyName(Strategy s);
std::string_view ModelChoiceName(ModelChoice m);

struct EstimatorSpec {
  Strategy strategy = Strategy::kCrude;
  ModelChoice model = ModelChoice::kNone;
  std::string endpoint;  // kExternal models and kExternalDirect

  // "crude", "gcomp+logistic", "gcomp2+boosted-trees", "iptw+external",
  // "external-direct".
  std::string Label() const;
  // Throws std::invalid_argument on inconsistent combinations.
  void Validate() const;

  // Inverse of Label(). `endpoint` fills the endpoint field.
  static EstimatorSpec Parse(std::string_view label, std::string endpoint = {});
};

struct WeightSummary {
  std::array<double, 2> max_weight{};      // [arm]
  std::array<double, 2> effective_size{};  // (sum w)^2 / sum w^2, per arm
};

struct PointEstimate {
  double ate = 0.0;
  std::optional<std::pair<double, double>> per_arm;  // (E[Y^1], E[Y^0])
  std::vector<std::string> warnings;
  std::optional<WeightSummary> weights;
};

// mean(y | x=1) - mean(y | x=0).
PointEstimate EstimateCrude(const SimulatedDataset& d);

// One outcome model on [x, z]; average of predicted contrasts.
PointEstimate EstimateGcomp(const SimulatedDataset& d, const ModelFactory& fit);

// One outcome model per arm on [z]; average of predicted contrasts.
PointEstimate EstimateGcompTwoModel(const SimulatedDataset& d,
                                    const ModelFactory& fit);

// Hajek IPTW with a propensity model fit on [z] -> x.
PointEstimate EstimateIptw(const SimulatedDataset& d, const ModelFactory& fit);

// Hajek IPTW with given propensities, one per row.
PointEstimate IptwFromPropensities(const SimulatedDataset& d,
                                   std::span<const double> propensity);

// Server-side estimate with its native interval; no bootstrap.
EstimateResult EstimateExternalDirect(const SimulatedDataset& d,
                                      ProtocolClient& client);

struct EstimatorOptions {
  LogisticOptions logistic;
  BoostedTreesConfig trees;
  std::size_t pool_size = 1;
};

// A ready-to-run estimator. Safe to call concurrently.
class Estimator {
 public:
  Estimator(EstimatorSpec spec, const EstimatorOptions& options = {});

  const EstimatorSpec& spec() const { return spec_; }
  std::string Label() const { return spec_.Label(); }

  PointEstimate Estimate(const SimulatedDataset& d) const;

  // Point estimate plus interval: native for external-direct, percentile
  // bootstrap when `bootstrap` is set, otherwise kind none.
  EstimateResult Run(const SimulatedDataset& d,
                     const std::optional<BootstrapConfig>& bootstrap) const;

  const std::shared_ptr<ProtocolClient>& client() const { return client_; }

 private:
  EstimatorSpec spec_;
  ModelFactory outcome_;
  ModelFactory propensity_;
  std::shared_ptr<ProtocolClient> client_;
};

}  // namespace atebench

#endif  // ATEBENCH_ESTIMATORS_H_
