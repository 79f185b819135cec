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

#include "atebench/models.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "atebench/errors.h"

namespace atebench {

void FeatureMatrix::Validate() const {
  if (values.size() != rows * cols) {
    throw ModelError(fmt::format("feature matrix holds {} values, expected {}x{}",
                                 values.size(), rows, cols));
  }
  for (const double v : values) {
    if (!std::isfinite(v)) throw ModelError("non-finite feature value");
  }
}

std::vector<double> FittedModel::PredictProba(const FeatureMatrix& X) const {
  if (X.cols != num_features()) {
    throw ModelError(fmt::format("model was fit on {} features, got {}",
                                 num_features(), X.cols));
  }
  return PredictImpl(X);
}

FeatureMatrix OutcomeFeatures(const SimulatedDataset& d,
                              std::optional<std::uint8_t> treatment) {
  const std::size_t p = d.num_confounders;
  FeatureMatrix X(d.size(), p + 1);
  for (std::size_t i = 0; i < d.size(); ++i) {
    X(i, 0) = treatment ? *treatment : d.x[i];
    const auto z = d.z_row(i);
    for (std::size_t j = 0; j < p; ++j) X(i, j + 1) = z[j];
  }
  return X;
}

FeatureMatrix ConfounderFeatures(const SimulatedDataset& d) {
  const std::size_t p = d.num_confounders;
  FeatureMatrix X(d.size(), p);
  std::transform(d.z.begin(), d.z.end(), X.values.begin(),
                 [](std::uint8_t b) { return static_cast<double>(b); });
  return X;
}

namespace {

// Largest key width for the dense counting path.
constexpr std::size_t kMaxDenseBits = 14;

bool AllBinary(const FeatureMatrix& X) {
  return std::all_of(X.values.begin(), X.values.end(),
                     [](double v) { return v == 0.0 || v == 1.0; });
}

// Binary features: the key (features..., label) read as a big-endian bit
// string sorts exactly like the lexicographic vector order.
PatternTable CompressBinary(const FeatureMatrix& X, Labels y) {
  const std::size_t bits = X.cols + 1;
  std::vector<std::uint32_t> counts(std::size_t{1} << bits, 0);
  for (std::size_t i = 0; i < X.rows; ++i) {
    std::uint32_t key = 0;
    const double* r = X.values.data() + i * X.cols;
    for (std::size_t j = 0; j < X.cols; ++j) key = (key << 1) | (r[j] != 0.0);
    counts[(key << 1) | y[i]] += 1;
  }
  const auto used = static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }));
  PatternTable t;
  t.features = FeatureMatrix(used, X.cols);
  t.labels.reserve(used);
  t.counts.reserve(used);
  std::size_t r = 0;
  for (std::size_t key = 0; key < counts.size(); ++key) {
    if (counts[key] == 0) continue;
    for (std::size_t j = 0; j < X.cols; ++j) {
      t.features(r, j) = static_cast<double>((key >> (bits - 1 - j)) & 1u);
    }
    t.labels.push_back(static_cast<double>(key & 1u));
    t.counts.push_back(counts[key]);
    ++r;
  }
  return t;
}

}  // namespace

PatternTable CompressPatterns(const FeatureMatrix& X, Labels y) {
  if (y.size() != X.rows) {
    throw ModelError(fmt::format("{} labels for {} rows", y.size(), X.rows));
  }
  if (X.cols + 1 <= kMaxDenseBits && std::all_of(y.begin(), y.end(),
                                                 [](auto v) { return v <= 1; }) &&
      AllBinary(X)) {
    return CompressBinary(X, y);
  }
  std::map<std::vector<double>, std::size_t> index;
  std::vector<double> key(X.cols + 1);
  std::vector<std::size_t> row_pattern(X.rows);
  for (std::size_t i = 0; i < X.rows; ++i) {
    const auto r = X.row(i);
    std::copy(r.begin(), r.end(), key.begin());
    key.back() = y[i];
    row_pattern[i] = index.try_emplace(key, index.size()).first->second;
  }
  // Renumber in key order so the result does not depend on row order.
  std::vector<std::size_t> rank(index.size());
  {
    std::size_t next = 0;
    for (const auto& [k, id] : index) rank[id] = next++;
  }
  PatternTable t;
  t.features = FeatureMatrix(index.size(), X.cols);
  t.labels.resize(index.size());
  t.counts.assign(index.size(), 0.0);
  for (const auto& [k, id] : index) {
    const std::size_t r = rank[id];
    std::copy(k.begin(), k.end() - 1, t.features.values.begin() + r * X.cols);
    t.labels[r] = k.back();
  }
  for (std::size_t i = 0; i < X.rows; ++i) t.counts[rank[row_pattern[i]]] += 1.0;
  return t;
}

}  // namespace atebench
