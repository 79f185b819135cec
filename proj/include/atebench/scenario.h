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

// Simulation scenarios built from real tabular data.
//
// A scenario is the triple of empirical distributions P(Z), P(X=1|z) and
// P(Y=1|x,z) over the joint strata z of a set of binary confounders. Strata in
// which only one treatment level was observed are dropped before the
// frequencies are taken, so positivity holds by construction and the back-door
// sum identifies the ATE exactly.

#ifndef ATEBENCH_SCENARIO_H_
#define ATEBENCH_SCENARIO_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "atebench/csv.h"
#include "atebench/dataset.h"
#include "json.hpp"

namespace atebench {

enum class ConfounderKind {
  kBinary,               // already 0/1
  kMedianSplit,          // 1 iff value > sample median, ties -> 0
  kCategoricalCollapse,  // category -> {0,1} via collapse_map
};

struct ConfounderSpec {
  std::string name;
  ConfounderKind kind = ConfounderKind::kBinary;
  std::map<std::string, int> collapse_map;  // kCategoricalCollapse only
};

// How a raw outcome/treatment column maps to {0,1}. An empty `coding` means
// the column must already hold 0/1 numbers.
struct BinaryColumn {
  std::string column;
  std::map<std::string, int> coding;
};

enum class FilterOp { kEq, kNe, kIn, kNotIn, kLt, kLe, kGt, kGe };

// Keep a row iff `column op values` holds. Ordered comparisons are numeric and
// use values[0].
struct RowFilter {
  std::string column;
  FilterOp op = FilterOp::kEq;
  std::vector<std::string> values;
};

struct IngestionConfig {
  std::string name;
  std::filesystem::path source;
  BinaryColumn outcome;
  BinaryColumn treatment;
  std::vector<ConfounderSpec> confounders;
  std::vector<RowFilter> row_filters;
};

// Parses the JSON ingestion config; relative `source` paths resolve against
// `base_dir`.
IngestionConfig IngestionConfigFromJson(const nlohmann::json& j,
                                        const std::filesystem::path& base_dir);
IngestionConfig LoadIngestionConfig(const std::filesystem::path& path);

// Binary-coded rows ready for scenario construction.
struct PreparedTable {
  std::string name;
  std::vector<std::string> confounder_names;
  std::vector<std::uint8_t> z;  // row-major, confounder_names.size() columns
  std::vector<std::uint8_t> x;
  std::vector<std::uint8_t> y;
  std::vector<std::string> log;

  std::size_t size() const { return x.size(); }
  std::size_t num_confounders() const { return confounder_names.size(); }
};

PreparedTable Ingest(const IngestionConfig& config);
PreparedTable PrepareTable(const CsvTable& raw, const IngestionConfig& config);

struct Scenario {
  std::string name;
  std::vector<std::string> confounder_names;
  std::vector<std::vector<std::uint8_t>> strata;
  std::vector<double> p_z;
  std::vector<double> p_x_given_z;
  std::vector<std::array<double, 2>> p_y_given_xz;  // [k][x]
  // Row counts behind the frequencies; informational.
  std::size_t source_rows = 0;
  std::vector<std::array<std::size_t, 2>> cell_rows;  // [k][x]
  std::vector<std::string> provenance;

  std::size_t num_strata() const { return strata.size(); }
  std::size_t num_confounders() const { return confounder_names.size(); }

  // Throws ScenarioError if any invariant fails.
  void Validate() const;
};

Scenario BuildScenario(const PreparedTable& table);

// Back-door sum over strata: sum_z P(z) [P(Y=1|1,z) - P(Y=1|0,z)].
double TrueAte(const Scenario& s);

// Draws n independent rows: stratum ~ P(Z), x ~ Bern(P(X=1|z)),
// y ~ Bern(P(Y=1|x,z)). Row i uses Philox counter i under key(seed), so the
// output is a pure function of (scenario, n, seed).
SimulatedDataset Simulate(const Scenario& s, std::size_t n, std::uint64_t seed);

// Same scenario with P(X=1|z) replaced by its P(Z)-weighted mean.
Scenario Randomized(const Scenario& s);

// Canonical scenario file: JSON, schema "atebench.scenario/1", probabilities
// at round-trip precision.
nlohmann::json ScenarioToJson(const Scenario& s);
Scenario ScenarioFromJson(const nlohmann::json& j);
void SaveScenario(const Scenario& s, const std::filesystem::path& path);
Scenario LoadScenario(const std::filesystem::path& path);

inline constexpr const char* kScenarioSchema = "atebench.scenario/1";

}  // namespace atebench

#endif  // ATEBENCH_SCENARIO_H_
