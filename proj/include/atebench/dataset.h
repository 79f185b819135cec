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

#ifndef ATEBENCH_DATASET_H_
#define ATEBENCH_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace atebench {

// Rows of (binary confounder vector, stratum index, treatment, outcome).
//
// `z` is row-major with `num_confounders` columns. `stratum` indexes into the
// generating Scenario's strata and is empty for datasets that did not come from
// a scenario.
struct SimulatedDataset {
  std::vector<std::string> confounder_names;
  std::size_t num_confounders = 0;
  std::vector<std::uint32_t> stratum;
  std::vector<std::uint8_t> z;
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> y;
  std::uint64_t seed = 0;

  std::size_t size() const { return x.size(); }

  std::span<const std::uint8_t> z_row(std::size_t i) const {
    return {z.data() + i * num_confounders, num_confounders};
  }

  // Rows `indices` in order (duplicates allowed).
  SimulatedDataset Subset(std::span<const std::uint32_t> indices) const;
};

// FNV-1a over the row payload; used to prove paired designs in audit logs.
std::uint64_t DatasetHash(const SimulatedDataset& d);

// CSV with header `stratum,<confounder names...>,x,y`. The stratum column is
// written only when present.
void WriteDatasetCsv(const SimulatedDataset& d, const std::filesystem::path& p);

// Reads a dataset CSV. Requires columns `x` and `y`; every other column except
// `stratum` is a binary confounder.
SimulatedDataset ReadDatasetCsv(const std::filesystem::path& p);

}  // namespace atebench

#endif  // ATEBENCH_DATASET_H_
