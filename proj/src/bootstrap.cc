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

#include "atebench/bootstrap.h"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>

#include "atebench/errors.h"
#include "atebench/parallel.h"
#include "atebench/rng.h"

namespace atebench {

std::string_view IntervalKindName(IntervalKind kind) {
  switch (kind) {
    case IntervalKind::kBootstrapPercentile:
      return "bootstrap-percentile";
    case IntervalKind::kNativeCredible:
      return "native-credible";
    case IntervalKind::kNone:
      return "none";
  }
  return "none";
}

void BootstrapConfig::Validate() const {
  if (iterations < 1) throw BootstrapError("bootstrap iterations must be >= 1");
  if (!(level > 0.0 && level < 1.0)) {
    throw BootstrapError(fmt::format("bootstrap level {} not in (0,1)", level));
  }
}

PercentileRanks PercentileRankPair(std::size_t iterations, double level) {
  const double alpha = 1.0 - level;
  // The epsilon keeps exact products such as 600 * 0.025 from flooring to 14.
  const double raw = static_cast<double>(iterations + 1) * alpha / 2.0;
  auto lo = static_cast<std::size_t>(std::floor(raw + 1e-9));
  lo = std::clamp<std::size_t>(lo, 1, (iterations + 1) / 2);
  return {lo, iterations + 1 - lo};
}

std::vector<std::uint32_t> ResampleIndices(std::size_t n, std::uint64_t seed,
                                           std::uint64_t replicate,
                                           std::uint64_t attempt) {
  if (n == 0) throw BootstrapError("cannot resample an empty dataset");
  const Philox rng(DeriveKey(seed, {replicate, attempt}));
  std::vector<std::uint32_t> out(n);
  for (std::size_t i = 0; i < n; i += 2) {
    const auto w = rng.Words(0, i / 2);
    out[i] = static_cast<std::uint32_t>(ToBoundedIndex(w[0], n));
    if (i + 1 < n) out[i + 1] = static_cast<std::uint32_t>(ToBoundedIndex(w[1], n));
  }
  return out;
}

EstimateResult BootstrapCi(const SimulatedDataset& d, const ScalarEstimator& est,
                           const BootstrapConfig& cfg) {
  cfg.Validate();
  const auto start = std::chrono::steady_clock::now();
  EstimateResult result;
  result.kind = IntervalKind::kBootstrapPercentile;
  result.point = est(d);

  const std::size_t B = cfg.iterations;
  const std::size_t budget = cfg.redraw_budget();
  std::vector<double> replicates(B);
  std::vector<std::size_t> redraws(B, 0);
  std::atomic<std::size_t> failures{0};

  ParallelFor(B, cfg.workers, [&](std::size_t b) {
    for (std::uint64_t attempt = 0;; ++attempt) {
      const auto indices = ResampleIndices(d.size(), cfg.seed, b, attempt);
      try {
        replicates[b] = est(d.Subset(indices));
        redraws[b] = attempt;
        return;
      } catch (const ProtocolError&) {
        throw;
      } catch (const EstimationError& e) {
        if (failures.fetch_add(1) + 1 > budget) {
          throw BootstrapError(fmt::format(
              "bootstrap exceeded {} redraws; last failure: {}", budget, e.what()));
        }
      }
    }
  });

  for (const auto r : redraws) result.redraw_count += r;
  std::vector<double> sorted = replicates;
  std::sort(sorted.begin(), sorted.end());
  const PercentileRanks ranks = PercentileRankPair(B, cfg.level);
  result.lo = sorted[ranks.lo - 1];
  result.hi = sorted[ranks.hi - 1];
  if (cfg.keep_replicates) result.replicate_estimates = std::move(replicates);
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace atebench
