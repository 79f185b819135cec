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

#include "atebench/estimators.h"

#include <fmt/format.h>

#include <chrono>
#include <stdexcept>

#include "atebench/errors.h"

namespace atebench {
namespace {

void RequireBothArms(const SimulatedDataset& d) {
  std::size_t treated = 0;
  for (const auto x : d.x) treated += x;
  if (treated == 0) throw EmptyArmError(1);
  if (treated == d.size()) throw EmptyArmError(0);
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (const double x : v) s += x;
  return s / static_cast<double>(v.size());
}

void CollectWarnings(const FittedModel& m, std::string_view role,
                     std::vector<std::string>* out) {
  const auto& diag = m.diagnostics();
  if (diag.separation || !diag.converged) {
    out->push_back(fmt::format("{}: {}", role,
                               diag.message.empty() ? "did not converge" : diag.message));
  }
}

// Rows of d with x == arm.
SimulatedDataset Arm(const SimulatedDataset& d, std::uint8_t arm) {
  std::vector<std::uint32_t> rows;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (d.x[i] == arm) rows.push_back(static_cast<std::uint32_t>(i));
  }
  return d.Subset(rows);
}

std::unique_ptr<FittedModel> FitArm(const ModelFactory& fit, const SimulatedDataset& arm,
                                    int label) {
  try {
    return fit(ConfounderFeatures(arm), arm.y);
  } catch (const ProtocolError& e) {
    throw ProtocolError(fmt::format("arm x={} outcome model: {}", label, e.what()));
  } catch (const ModelError& e) {
    throw ModelError(fmt::format("arm x={} outcome model: {}", label, e.what()));
  }
}

PointEstimate FromPredictions(const std::vector<double>& p1,
                              const std::vector<double>& p0) {
  PointEstimate out;
  const double m1 = Mean(p1), m0 = Mean(p0);
  double contrast = 0.0;
  for (std::size_t i = 0; i < p1.size(); ++i) contrast += p1[i] - p0[i];
  out.ate = contrast / static_cast<double>(p1.size());
  out.per_arm = {m1, m0};
  return out;
}

}  // namespace

std::string_view StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kCrude: return "crude";
    case Strategy::kGcomp: return "gcomp";
    case Strategy::kGcompTwoModel: return "gcomp2";
    case Strategy::kIptw: return "iptw";
    case Strategy::kExternalDirect: return "external-direct";
  }
  return "?";
}

std::string_view ModelChoiceName(ModelChoice m) {
  switch (m) {
    case ModelChoice::kNone: return "none";
    case ModelChoice::kLogistic: return "logistic";
    case ModelChoice::kBoostedTrees: return "boosted-trees";
    case ModelChoice::kExternal: return "external";
  }
  return "?";
}

std::string EstimatorSpec::Label() const {
  if (model == ModelChoice::kNone) return std::string(StrategyName(strategy));
  return fmt::format("{}+{}", StrategyName(strategy), ModelChoiceName(model));
}

void EstimatorSpec::Validate() const {
  const bool modelless =
      strategy == Strategy::kCrude || strategy == Strategy::kExternalDirect;
  if (modelless && model != ModelChoice::kNone) {
    throw std::invalid_argument(
        fmt::format("{} takes no model", StrategyName(strategy)));
  }
  if (!modelless && model == ModelChoice::kNone) {
    throw std::invalid_argument(
        fmt::format("{} needs a model", StrategyName(strategy)));
  }
  const bool remote =
      strategy == Strategy::kExternalDirect || model == ModelChoice::kExternal;
  if (remote && endpoint.empty()) {
    throw std::invalid_argument(fmt::format("{} needs an endpoint", Label()));
  }
}

EstimatorSpec EstimatorSpec::Parse(std::string_view label, std::string endpoint) {
  EstimatorSpec spec;
  spec.endpoint = std::move(endpoint);
  const auto plus = label.find('+');
  const std::string_view strategy = label.substr(0, plus);
  const std::string_view model =
      plus == std::string_view::npos ? std::string_view{} : label.substr(plus + 1);
  bool found = false;
  for (auto s : {Strategy::kCrude, Strategy::kGcomp, Strategy::kGcompTwoModel,
                 Strategy::kIptw, Strategy::kExternalDirect}) {
    if (StrategyName(s) == strategy) {
      spec.strategy = s;
      found = true;
    }
  }
  if (strategy == "tlearner") {
    spec.strategy = Strategy::kGcompTwoModel;
    found = true;
  }
  if (!found) {
    throw std::invalid_argument(fmt::format("unknown strategy '{}'", strategy));
  }
  if (!model.empty()) {
    found = false;
    for (auto m : {ModelChoice::kLogistic, ModelChoice::kBoostedTrees,
                   ModelChoice::kExternal}) {
      if (ModelChoiceName(m) == model) {
        spec.model = m;
        found = true;
      }
    }
    if (!found) throw std::invalid_argument(fmt::format("unknown model '{}'", model));
  }
  spec.Validate();
  return spec;
}

PointEstimate EstimateCrude(const SimulatedDataset& d) {
  std::size_t n1 = 0, y1 = 0, y0 = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    n1 += d.x[i];
    (d.x[i] ? y1 : y0) += d.y[i];
  }
  const std::size_t n0 = d.size() - n1;
  if (n1 == 0) throw EmptyArmError(1);
  if (n0 == 0) throw EmptyArmError(0);
  PointEstimate out;
  const double m1 = static_cast<double>(y1) / static_cast<double>(n1);
  const double m0 = static_cast<double>(y0) / static_cast<double>(n0);
  out.ate = m1 - m0;
  out.per_arm = {m1, m0};
  return out;
}

PointEstimate EstimateGcomp(const SimulatedDataset& d, const ModelFactory& fit) {
  RequireBothArms(d);
  const auto model = fit(OutcomeFeatures(d), d.y);
  PointEstimate out = FromPredictions(model->PredictProba(OutcomeFeatures(d, 1)),
                                      model->PredictProba(OutcomeFeatures(d, 0)));
  CollectWarnings(*model, "outcome model", &out.warnings);
  return out;
}

PointEstimate EstimateGcompTwoModel(const SimulatedDataset& d,
                                    const ModelFactory& fit) {
  RequireBothArms(d);
  const auto m1 = FitArm(fit, Arm(d, 1), 1);
  const auto m0 = FitArm(fit, Arm(d, 0), 0);
  const FeatureMatrix all = ConfounderFeatures(d);
  PointEstimate out = FromPredictions(m1->PredictProba(all), m0->PredictProba(all));
  CollectWarnings(*m1, "arm x=1 outcome model", &out.warnings);
  CollectWarnings(*m0, "arm x=0 outcome model", &out.warnings);
  return out;
}

PointEstimate IptwFromPropensities(const SimulatedDataset& d,
                                   std::span<const double> propensity) {
  RequireBothArms(d);
  if (propensity.size() != d.size()) {
    throw ModelError(fmt::format("{} propensities for {} rows", propensity.size(),
                                 d.size()));
  }
  std::array<double, 2> sum_w{}, sum_wy{}, sum_w2{}, max_w{};
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double e = propensity[i];
    if (e <= 0.0 || e >= 1.0) {
      throw InfiniteWeightError(
          fmt::format("fitted propensity {} at row {} gives an infinite weight", e, i));
    }
    const int arm = d.x[i];
    const double w = arm ? 1.0 / e : 1.0 / (1.0 - e);
    sum_w[arm] += w;
    sum_wy[arm] += w * d.y[i];
    sum_w2[arm] += w * w;
    max_w[arm] = std::max(max_w[arm], w);
  }
  PointEstimate out;
  const double m1 = sum_wy[1] / sum_w[1];
  const double m0 = sum_wy[0] / sum_w[0];
  out.ate = m1 - m0;
  out.per_arm = {m1, m0};
  WeightSummary ws;
  for (int arm = 0; arm < 2; ++arm) {
    ws.max_weight[arm] = max_w[arm];
    ws.effective_size[arm] = sum_w[arm] * sum_w[arm] / sum_w2[arm];
  }
  out.weights = ws;
  return out;
}

PointEstimate EstimateIptw(const SimulatedDataset& d, const ModelFactory& fit) {
  RequireBothArms(d);
  const FeatureMatrix z = ConfounderFeatures(d);
  const auto model = fit(z, d.x);
  PointEstimate out = IptwFromPropensities(d, model->PredictProba(z));
  CollectWarnings(*model, "propensity model", &out.warnings);
  return out;
}

EstimateResult EstimateExternalDirect(const SimulatedDataset& d,
                                      ProtocolClient& client) {
  const auto start = std::chrono::steady_clock::now();
  const ExternalAte ate = RequestExternalAte(client, d);
  EstimateResult r;
  r.point = ate.ate;
  r.lo = ate.lo;
  r.hi = ate.hi;
  r.kind = IntervalKind::kNativeCredible;
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

Estimator::Estimator(EstimatorSpec spec, const EstimatorOptions& options)
    : spec_(std::move(spec)) {
  spec_.Validate();
  const bool remote = spec_.strategy == Strategy::kExternalDirect ||
                      spec_.model == ModelChoice::kExternal;
  if (remote) client_ = ProtocolClient::Connect(spec_.endpoint, options.pool_size);
  switch (spec_.model) {
    case ModelChoice::kNone:
      break;
    case ModelChoice::kLogistic:
      outcome_ = propensity_ = LogisticFactory(options.logistic);
      break;
    case ModelChoice::kBoostedTrees:
      outcome_ = propensity_ = BoostedTreesFactory(options.trees);
      break;
    case ModelChoice::kExternal:
      outcome_ = ExternalModelFactory(client_, ExternalTask::kOutcome);
      propensity_ = ExternalModelFactory(client_, ExternalTask::kPropensity);
      break;
  }
  if (spec_.strategy == Strategy::kExternalDirect &&
      !client_->HasCapability("estimate_ate")) {
    throw ProtocolError(fmt::format("{} does not offer estimate_ate", spec_.endpoint));
  }
}

PointEstimate Estimator::Estimate(const SimulatedDataset& d) const {
  switch (spec_.strategy) {
    case Strategy::kCrude:
      return EstimateCrude(d);
    case Strategy::kGcomp:
      return EstimateGcomp(d, outcome_);
    case Strategy::kGcompTwoModel:
      return EstimateGcompTwoModel(d, outcome_);
    case Strategy::kIptw:
      return EstimateIptw(d, propensity_);
    case Strategy::kExternalDirect: {
      PointEstimate p;
      p.ate = EstimateExternalDirect(d, *client_).point;
      return p;
    }
  }
  throw std::logic_error("unhandled strategy");
}

EstimateResult Estimator::Run(const SimulatedDataset& d,
                              const std::optional<BootstrapConfig>& bootstrap) const {
  if (spec_.strategy == Strategy::kExternalDirect) {
    return EstimateExternalDirect(d, *client_);
  }
  if (bootstrap) {
    return BootstrapCi(
        d, [this](const SimulatedDataset& s) { return Estimate(s).ate; }, *bootstrap);
  }
  const auto start = std::chrono::steady_clock::now();
  EstimateResult r;
  r.point = r.lo = r.hi = Estimate(d).ate;
  r.kind = IntervalKind::kNone;
  r.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace atebench
