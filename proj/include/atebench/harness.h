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

// Monte Carlo studies: scenario x sample size x estimator.
//
// Replicate r at sample size n simulates one dataset from stream
// (base_seed, n, r) and hands that same dataset to every estimator, so the
// estimators are compared on paired data. Bootstrap resamples come from a
// second stream derived from the same labels, also shared by all estimators.
//
// Metric definitions (R = number of successful replicates, theta = truth):
//   coverage        fraction of intervals with lo <= theta <= hi
//   mean_width      mean(hi - lo)
//   mean_error      mean(point - theta)
//   mse             mean((point - theta)^2)
//   bias-eliminated coverage
//                   fraction with lo <= theta + mean_error <= hi. Shifting the
//                   target by the bias is the same as centering every
//                   estimate at the truth, without re-running anything.
//   mc_se_coverage  sqrt(p (1 - p) / R) for p = coverage

#ifndef ATEBENCH_HARNESS_H_
#define ATEBENCH_HARNESS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "atebench/bootstrap.h"
#include "atebench/estimators.h"
#include "atebench/result.h"
#include "atebench/scenario.h"
#include "json.hpp"

namespace atebench {

enum class Parallelism { kReplicate, kBootstrap };

struct StudyConfig {
  std::filesystem::path scenario;  // scenario file or ingestion config
  std::vector<std::size_t> sample_sizes{200, 500, 1000};
  std::size_t replicates = 1000;
  std::vector<EstimatorSpec> estimators;
  // Unset means point estimates only (interval kind none).
  std::optional<BootstrapConfig> bootstrap = BootstrapConfig{};
  std::uint64_t base_seed = kDefaultSeed;
  std::size_t workers = 1;
  Parallelism parallelism = Parallelism::kReplicate;
  EstimatorOptions estimator_options;

  void Validate() const;
};

// JSON keys: scenario, sample_sizes, replicates, estimators (labels),
// endpoint, bootstrap {iterations, level, max_redraws} (iterations 0 disables
// it), base_seed, workers, parallelism ("replicate" | "bootstrap"),
// boosted_trees {learning_rate, max_depth, rounds, min_child_weight,
// l2_penalty}, logistic {clip_epsilon}, pool_size. Relative scenario paths
// resolve against `base_dir`.
StudyConfig StudyConfigFromJson(const nlohmann::json& j,
                                const std::filesystem::path& base_dir);
StudyConfig LoadStudyConfig(const std::filesystem::path& path);

// A saved scenario file (schema key present) or an ingestion config to build
// from.
Scenario LoadOrBuildScenario(const std::filesystem::path& path);

struct StudyMetrics {
  double coverage = 0.0;
  double mean_width = 0.0;
  double bias_eliminated_coverage = 0.0;
  double mean_error = 0.0;
  double mse = 0.0;
  double mean_time_s = 0.0;
  double mc_se_coverage = 0.0;
  std::size_t replicates = 0;  // successful ones
  std::size_t failures = 0;
  std::size_t redraws = 0;
};

StudyMetrics ComputeMetrics(std::span<const EstimateResult> results, double truth,
                            std::size_t failures = 0);

// Fraction of intervals containing `target`.
double CoverageOf(std::span<const EstimateResult> results, double target);

struct CellMetrics {
  std::size_t sample_size;
  std::string estimator;
  StudyMetrics metrics;
};

struct StudyResult {
  std::string scenario;
  double truth = 0.0;
  std::vector<CellMetrics> cells;  // sample size major, estimator order kept
};

struct RunHooks {
  std::ostream* audit = nullptr;     // JSONL, one record per (estimator, replicate)
  std::ostream* progress = nullptr;  // one line per finished cell
};

StudyResult RunStudy(const StudyConfig& cfg, const Scenario& scenario,
                     const RunHooks& hooks = {});

// Seeds for replicate `replicate` at sample size `n`.
std::uint64_t DatasetSeed(std::uint64_t base_seed, std::size_t n,
                          std::size_t replicate);
std::uint64_t BootstrapSeed(std::uint64_t base_seed, std::size_t n,
                            std::size_t replicate);

}  // namespace atebench

#endif  // ATEBENCH_HARNESS_H_
