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

#ifndef ATEBENCH_RESULT_H_
#define ATEBENCH_RESULT_H_

#include <cstddef>
#include <string_view>
#include <vector>

namespace atebench {

enum class IntervalKind { kBootstrapPercentile, kNativeCredible, kNone };

std::string_view IntervalKindName(IntervalKind kind);

// A point estimate with its interval. With kind == kNone, lo and hi equal the
// point.
struct EstimateResult {
  double point = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  IntervalKind kind = IntervalKind::kNone;
  double wall_time_s = 0.0;
  std::size_t redraw_count = 0;
  std::vector<double> replicate_estimates;  // kept only when auditing
};

}  // namespace atebench

#endif  // ATEBENCH_RESULT_H_
