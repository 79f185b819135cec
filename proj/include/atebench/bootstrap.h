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

// Percentile bootstrap.
//
// Replicate slot b draws its resample from stream (seed, b, attempt). When the
// estimator fails on a resample the slot moves to the next attempt, so a slot's
// final estimate and the total redraw count depend only on (data, seed), never
// on the worker count or on which slot finished first.

#ifndef ATEBENCH_BOOTSTRAP_H_
#define ATEBENCH_BOOTSTRAP_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "atebench/dataset.h"
#include "atebench/result.h"

namespace atebench {

inline constexpr std::uint64_t kDefaultSeed = 20240611;

struct BootstrapConfig {
  std::size_t iterations = 599;
  double level = 0.95;
  std::optional<std::size_t> max_redraws;  // default 10 * iterations
  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 1;
  bool keep_replicates = false;

  void Validate() const;
  std::size_t redraw_budget() const {
    return max_redraws.value_or(10 * iterations);
  }
};

// 1-based order-statistic ranks: k_lo = floor((B+1)(1-level)/2), clamped to
// at least 1, and k_hi = B + 1 - k_lo.
struct PercentileRanks {
  std::size_t lo;
  std::size_t hi;
};
PercentileRanks PercentileRankPair(std::size_t iterations, double level);

// n indices uniform on [0, n), drawn i.i.d. from stream (seed, replicate,
// attempt).
std::vector<std::uint32_t> ResampleIndices(std::size_t n, std::uint64_t seed,
                                           std::uint64_t replicate,
                                           std::uint64_t attempt = 0);

// Any ATE point estimator. Failures are signalled by EstimationError.
using ScalarEstimator = std::function<double(const SimulatedDataset&)>;

// Point estimate on d plus a percentile interval from cfg.iterations
// successful resamples. Failed resamples (EstimationError other than protocol
// failures) are redrawn; exceeding the redraw budget throws BootstrapError.
// wall_time_s covers the point estimate and every replicate.
EstimateResult BootstrapCi(const SimulatedDataset& d, const ScalarEstimator& est,
                           const BootstrapConfig& cfg);

}  // namespace atebench

#endif  // ATEBENCH_BOOTSTRAP_H_
