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

#include "atebench/scenario.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>

#include "atebench/errors.h"
#include "atebench/rng.h"

namespace atebench {
namespace {

using nlohmann::json;

ConfounderKind ParseKind(const std::string& s) {
  if (s == "binary") return ConfounderKind::kBinary;
  if (s == "continuous-median-split") return ConfounderKind::kMedianSplit;
  if (s == "categorical-collapse") return ConfounderKind::kCategoricalCollapse;
  throw IngestError("unknown confounder kind '" + s + "'");
}

FilterOp ParseOp(const std::string& s) {
  static const std::map<std::string, FilterOp> kOps = {
      {"eq", FilterOp::kEq}, {"ne", FilterOp::kNe},   {"in", FilterOp::kIn},
      {"not_in", FilterOp::kNotIn}, {"lt", FilterOp::kLt},
      {"le", FilterOp::kLe}, {"gt", FilterOp::kGt},   {"ge", FilterOp::kGe}};
  const auto it = kOps.find(s);
  if (it == kOps.end()) throw IngestError("unknown row filter op '" + s + "'");
  return it->second;
}

std::string OpName(FilterOp op) {
  switch (op) {
    case FilterOp::kEq: return "eq";
    case FilterOp::kNe: return "ne";
    case FilterOp::kIn: return "in";
    case FilterOp::kNotIn: return "not_in";
    case FilterOp::kLt: return "lt";
    case FilterOp::kLe: return "le";
    case FilterOp::kGt: return "gt";
    case FilterOp::kGe: return "ge";
  }
  return "?";
}

std::string ValueAsString(const json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

std::map<std::string, int> ParseCoding(const json& j, const std::string& what) {
  std::map<std::string, int> coding;
  for (const auto& [key, value] : j.items()) {
    const int code = value.get<int>();
    if (code != 0 && code != 1) {
      throw IngestError(what + ": coding for '" + key + "' must be 0 or 1");
    }
    coding[key] = code;
  }
  return coding;
}

BinaryColumn ParseBinaryColumn(const json& j, const std::string& what) {
  BinaryColumn col;
  if (j.is_string()) {
    col.column = j.get<std::string>();
    return col;
  }
  col.column = j.at("column").get<std::string>();
  if (j.contains("coding")) col.coding = ParseCoding(j.at("coding"), what);
  return col;
}

std::size_t RequireColumn(const CsvTable& t, const std::string& name) {
  const auto idx = t.ColumnIndex(name);
  if (!idx) throw IngestError("missing column '" + name + "'");
  return *idx;
}

double RequireNumber(const std::string& text, const std::string& column,
                     std::size_t row) {
  const auto v = ParseDouble(text);
  if (!v || !std::isfinite(*v)) {
    throw IngestError(fmt::format("column '{}' row {}: '{}' is not a number",
                                  column, row + 1, text));
  }
  return *v;
}

bool FilterKeeps(const RowFilter& f, const std::string& value, std::size_t row) {
  switch (f.op) {
    case FilterOp::kEq: return value == f.values.at(0);
    case FilterOp::kNe: return value != f.values.at(0);
    case FilterOp::kIn:
      return std::find(f.values.begin(), f.values.end(), value) !=
             f.values.end();
    case FilterOp::kNotIn:
      return std::find(f.values.begin(), f.values.end(), value) ==
             f.values.end();
    default: break;
  }
  const double lhs = RequireNumber(value, f.column, row);
  const double rhs = RequireNumber(f.values.at(0), f.column + " filter", 0);
  switch (f.op) {
    case FilterOp::kLt: return lhs < rhs;
    case FilterOp::kLe: return lhs <= rhs;
    case FilterOp::kGt: return lhs > rhs;
    case FilterOp::kGe: return lhs >= rhs;
    default: return false;
  }
}

std::uint8_t CodeBinary(const BinaryColumn& col, const std::string& value,
                        std::size_t row) {
  if (!col.coding.empty()) {
    const auto it = col.coding.find(value);
    if (it == col.coding.end()) {
      throw IngestError(fmt::format(
          "column '{}' row {}: value '{}' is not binary under the declared "
          "coding",
          col.column, row + 1, value));
    }
    return static_cast<std::uint8_t>(it->second);
  }
  const auto v = ParseDouble(value);
  if (!v || (*v != 0.0 && *v != 1.0)) {
    throw IngestError(fmt::format("column '{}' row {}: '{}' is not 0/1",
                                  col.column, row + 1, value));
  }
  return static_cast<std::uint8_t>(*v);
}

double Median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string StratumLabel(const std::vector<std::uint8_t>& z) {
  std::string s;
  for (const auto b : z) s.push_back(b ? '1' : '0');
  return s;
}

}  // namespace

// ---------------------------------------------------------------------------
// Ingestion

IngestionConfig IngestionConfigFromJson(const json& j,
                                        const std::filesystem::path& base_dir) {
  IngestionConfig c;
  try {
    c.name = j.value("name", std::string());
    std::filesystem::path source = j.at("source").get<std::string>();
    c.source = source.is_absolute() ? source : base_dir / source;
    c.outcome = ParseBinaryColumn(j.at("outcome"), "outcome");
    c.treatment = ParseBinaryColumn(j.at("treatment"), "treatment");
    for (const auto& cj : j.at("confounders")) {
      ConfounderSpec spec;
      spec.name = cj.at("name").get<std::string>();
      spec.kind = ParseKind(cj.value("kind", std::string("binary")));
      if (cj.contains("collapse_map")) {
        spec.collapse_map =
            ParseCoding(cj.at("collapse_map"), "confounder " + spec.name);
      }
      if ((spec.kind == ConfounderKind::kCategoricalCollapse) !=
          !spec.collapse_map.empty()) {
        throw IngestError("confounder '" + spec.name +
                          "': collapse_map is required iff kind is "
                          "categorical-collapse");
      }
      c.confounders.push_back(std::move(spec));
    }
    if (j.contains("row_filters")) {
      for (const auto& fj : j.at("row_filters")) {
        RowFilter f;
        f.column = fj.at("column").get<std::string>();
        f.op = ParseOp(fj.at("op").get<std::string>());
        if (fj.contains("values")) {
          for (const auto& v : fj.at("values")) {
            f.values.push_back(ValueAsString(v));
          }
        } else {
          f.values.push_back(ValueAsString(fj.at("value")));
        }
        if (f.values.empty()) {
          throw IngestError("row filter on '" + f.column + "' has no values");
        }
        c.row_filters.push_back(std::move(f));
      }
    }
  } catch (const json::exception& e) {
    throw IngestError(std::string("ingestion config: ") + e.what());
  }
  if (c.confounders.empty()) throw IngestError("no confounders declared");
  return c;
}

IngestionConfig LoadIngestionConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IngestError("cannot open " + path.string());
  json j;
  try {
    j = json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw IngestError(path.string() + ": " + e.what());
  }
  return IngestionConfigFromJson(j, path.parent_path());
}

PreparedTable PrepareTable(const CsvTable& raw, const IngestionConfig& config) {
  PreparedTable out;
  out.name = config.name;
  out.log.push_back(fmt::format("source {} ({} rows)", config.source.string(),
                                raw.rows.size()));

  // Validate every referenced column before touching rows.
  const std::size_t y_col = RequireColumn(raw, config.outcome.column);
  const std::size_t x_col = RequireColumn(raw, config.treatment.column);
  std::vector<std::size_t> z_cols;
  for (const auto& spec : config.confounders) {
    z_cols.push_back(RequireColumn(raw, spec.name));
    out.confounder_names.push_back(spec.name);
  }
  std::vector<std::size_t> filter_cols;
  for (const auto& f : config.row_filters) {
    filter_cols.push_back(RequireColumn(raw, f.column));
  }

  std::vector<std::size_t> kept;
  kept.reserve(raw.rows.size());
  for (std::size_t r = 0; r < raw.rows.size(); ++r) kept.push_back(r);
  for (std::size_t i = 0; i < config.row_filters.size(); ++i) {
    const auto& f = config.row_filters[i];
    std::vector<std::size_t> next;
    for (const std::size_t r : kept) {
      if (FilterKeeps(f, raw.rows[r][filter_cols[i]], r)) next.push_back(r);
    }
    std::string values;
    for (const auto& v : f.values) values += (values.empty() ? "" : "|") + v;
    out.log.push_back(fmt::format("filter {} {} {}: kept {} of {}", f.column,
                                  OpName(f.op), values, next.size(),
                                  kept.size()));
    kept = std::move(next);
  }

  const std::size_t n = kept.size();
  const std::size_t d = config.confounders.size();
  out.x.resize(n);
  out.y.resize(n);
  out.z.resize(n * d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = raw.rows[kept[i]];
    out.y[i] = CodeBinary(config.outcome, row[y_col], kept[i]);
    out.x[i] = CodeBinary(config.treatment, row[x_col], kept[i]);
  }

  for (std::size_t j = 0; j < d; ++j) {
    const auto& spec = config.confounders[j];
    const std::size_t col = z_cols[j];
    std::size_t ones = 0;
    switch (spec.kind) {
      case ConfounderKind::kBinary: {
        const BinaryColumn as_col{spec.name, {}};
        for (std::size_t i = 0; i < n; ++i) {
          out.z[i * d + j] = CodeBinary(as_col, raw.rows[kept[i]][col], kept[i]);
          ones += out.z[i * d + j];
        }
        out.log.push_back(fmt::format("{}: binary ({} of {} are 1)", spec.name,
                                      ones, n));
        break;
      }
      case ConfounderKind::kMedianSplit: {
        std::vector<double> values(n);
        for (std::size_t i = 0; i < n; ++i) {
          values[i] = RequireNumber(raw.rows[kept[i]][col], spec.name, kept[i]);
        }
        const double median = n > 0 ? Median(values) : 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          out.z[i * d + j] = values[i] > median ? 1 : 0;
          ones += out.z[i * d + j];
        }
        out.log.push_back(fmt::format(
            "{}: median split at {} (1 iff value > median; {} of {} are 1)",
            spec.name, median, ones, n));
        break;
      }
      case ConfounderKind::kCategoricalCollapse: {
        for (std::size_t i = 0; i < n; ++i) {
          const auto& value = raw.rows[kept[i]][col];
          const auto it = spec.collapse_map.find(value);
          if (it == spec.collapse_map.end()) {
            throw IngestError(fmt::format(
                "column '{}' row {}: category '{}' has no collapse_map entry",
                spec.name, kept[i] + 1, value));
          }
          out.z[i * d + j] = static_cast<std::uint8_t>(it->second);
          ones += out.z[i * d + j];
        }
        out.log.push_back(fmt::format("{}: categorical collapse ({} of {} are 1)",
                                      spec.name, ones, n));
        break;
      }
    }
  }
  std::size_t treated = 0, events = 0;
  for (std::size_t i = 0; i < n; ++i) {
    treated += out.x[i];
    events += out.y[i];
  }
  out.log.push_back(fmt::format("prepared {} rows: {} treated ({}), {} events "
                                "({})",
                                n, treated, config.treatment.column, events,
                                config.outcome.column));
  return out;
}

PreparedTable Ingest(const IngestionConfig& config) {
  return PrepareTable(ReadCsvFile(config.source), config);
}

// ---------------------------------------------------------------------------
// Scenario

void Scenario::Validate() const {
  const std::size_t k = strata.size();
  const std::size_t d = confounder_names.size();
  if (k == 0) throw ScenarioError("scenario has no strata");
  if (p_z.size() != k || p_x_given_z.size() != k || p_y_given_xz.size() != k) {
    throw ScenarioError("scenario arrays disagree on the number of strata");
  }
  std::set<std::vector<std::uint8_t>> seen;
  for (const auto& z : strata) {
    if (z.size() != d) {
      throw ScenarioError("stratum length differs from confounder count");
    }
    for (const auto b : z) {
      if (b > 1) throw ScenarioError("stratum entries must be 0/1");
    }
    if (!seen.insert(z).second) {
      throw ScenarioError("duplicate stratum " + StratumLabel(z));
    }
  }
  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (!(p_z[i] >= 0.0)) throw ScenarioError("negative or NaN P(z)");
    total += p_z[i];
    if (!(p_x_given_z[i] > 0.0 && p_x_given_z[i] < 1.0)) {
      throw ScenarioError(fmt::format(
          "positivity violated in stratum {}: P(X=1|z)={}",
          StratumLabel(strata[i]), p_x_given_z[i]));
    }
    for (const double p : p_y_given_xz[i]) {
      if (!(p >= 0.0 && p <= 1.0)) {
        throw ScenarioError("P(Y=1|x,z) outside [0,1]");
      }
    }
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw ScenarioError(fmt::format("P(Z) sums to {:.17g}", total));
  }
}

Scenario BuildScenario(const PreparedTable& table) {
  if (table.size() == 0) throw ScenarioError("prepared table is empty");
  const std::size_t d = table.num_confounders();

  struct Cell {
    std::array<std::size_t, 2> rows{0, 0};
    std::array<std::size_t, 2> events{0, 0};
  };
  std::map<std::vector<std::uint8_t>, Cell> cells;  // lexicographic strata
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::vector<std::uint8_t> z(table.z.begin() + i * d,
                                table.z.begin() + (i + 1) * d);
    Cell& c = cells[std::move(z)];
    c.rows[table.x[i]] += 1;
    c.events[table.x[i]] += table.y[i];
  }

  Scenario s;
  s.name = table.name;
  s.confounder_names = table.confounder_names;
  s.provenance = table.log;
  std::size_t retained = 0, dropped_rows = 0, dropped_strata = 0;
  for (const auto& [z, c] : cells) {
    if (c.rows[0] > 0 && c.rows[1] > 0) {
      retained += c.rows[0] + c.rows[1];
    } else {
      dropped_rows += c.rows[0] + c.rows[1];
      ++dropped_strata;
    }
  }
  if (retained == 0) {
    throw ScenarioError("every stratum lacks one treatment level");
  }
  for (const auto& [z, c] : cells) {
    if (c.rows[0] == 0 || c.rows[1] == 0) continue;
    const std::size_t n_k = c.rows[0] + c.rows[1];
    s.strata.push_back(z);
    s.p_z.push_back(static_cast<double>(n_k) / static_cast<double>(retained));
    s.p_x_given_z.push_back(static_cast<double>(c.rows[1]) /
                            static_cast<double>(n_k));
    s.p_y_given_xz.push_back(
        {static_cast<double>(c.events[0]) / static_cast<double>(c.rows[0]),
         static_cast<double>(c.events[1]) / static_cast<double>(c.rows[1])});
    s.cell_rows.push_back(c.rows);
  }
  s.source_rows = retained;
  s.provenance.push_back(fmt::format(
      "positivity filter: {} of {} observed strata kept, {} rows in {} "
      "single-arm strata dropped, {} rows retained",
      s.strata.size(), cells.size(), dropped_rows, dropped_strata, retained));
  s.Validate();
  s.provenance.push_back(fmt::format("true ATE {:.17g}", TrueAte(s)));
  return s;
}

double TrueAte(const Scenario& s) {
  double treated = 0.0, control = 0.0;
  for (std::size_t k = 0; k < s.num_strata(); ++k) {
    treated += s.p_y_given_xz[k][1] * s.p_z[k];
    control += s.p_y_given_xz[k][0] * s.p_z[k];
  }
  return treated - control;
}

SimulatedDataset Simulate(const Scenario& s, std::size_t n,
                          std::uint64_t seed) {
  const std::size_t k = s.num_strata();
  const std::size_t d = s.num_confounders();
  if (k == 0) throw ScenarioError("cannot simulate from an empty scenario");

  std::vector<double> cumulative(k);
  std::partial_sum(s.p_z.begin(), s.p_z.end(), cumulative.begin());
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < k; ++i) {
    if (s.p_z[i] > 0.0) last_positive = i;
  }

  SimulatedDataset out;
  out.confounder_names = s.confounder_names;
  out.num_confounders = d;
  out.seed = seed;
  out.stratum.resize(n);
  out.x.resize(n);
  out.y.resize(n);
  out.z.resize(n * d);

  const Philox rng(DeriveKey(seed, {}));
  for (std::size_t i = 0; i < n; ++i) {
    const auto first = rng.Words(0, i);
    const auto second = rng.Words(1, i);
    const double u_z = ToUnitInterval(first[0]);
    const double u_x = ToUnitInterval(first[1]);
    const double u_y = ToUnitInterval(second[0]);
    std::size_t stratum = static_cast<std::size_t>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u_z) -
        cumulative.begin());
    if (stratum >= k) stratum = last_positive;
    const std::uint8_t x = u_x < s.p_x_given_z[stratum] ? 1 : 0;
    const std::uint8_t y = u_y < s.p_y_given_xz[stratum][x] ? 1 : 0;
    out.stratum[i] = static_cast<std::uint32_t>(stratum);
    out.x[i] = x;
    out.y[i] = y;
    std::copy(s.strata[stratum].begin(), s.strata[stratum].end(),
              out.z.begin() + i * d);
  }
  return out;
}

Scenario Randomized(const Scenario& s) {
  Scenario out = s;
  double mean = 0.0;
  for (std::size_t k = 0; k < s.num_strata(); ++k) {
    mean += s.p_z[k] * s.p_x_given_z[k];
  }
  std::fill(out.p_x_given_z.begin(), out.p_x_given_z.end(), mean);
  out.provenance.push_back(
      fmt::format("randomized: P(X=1|z) set to {:.17g} in every stratum", mean));
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

json ScenarioToJson(const Scenario& s) {
  json j;
  j["schema"] = kScenarioSchema;
  j["name"] = s.name;
  j["confounder_names"] = s.confounder_names;
  json strata = json::array();
  for (const auto& z : s.strata) {
    json row = json::array();
    for (const auto b : z) row.push_back(static_cast<int>(b));
    strata.push_back(std::move(row));
  }
  j["strata"] = std::move(strata);
  j["p_z"] = s.p_z;
  j["p_x_given_z"] = s.p_x_given_z;
  json py = json::array();
  for (const auto& cell : s.p_y_given_xz) py.push_back({cell[0], cell[1]});
  j["p_y_given_xz"] = std::move(py);
  j["source_rows"] = s.source_rows;
  json rows = json::array();
  for (const auto& cell : s.cell_rows) rows.push_back({cell[0], cell[1]});
  j["cell_rows"] = std::move(rows);
  j["true_ate"] = TrueAte(s);
  j["provenance"] = s.provenance;
  return j;
}

Scenario ScenarioFromJson(const json& j) {
  Scenario s;
  try {
    const auto schema = j.at("schema").get<std::string>();
    if (schema != kScenarioSchema) {
      throw ScenarioError("unsupported scenario schema '" + schema + "'");
    }
    s.name = j.value("name", std::string());
    s.confounder_names = j.at("confounder_names").get<std::vector<std::string>>();
    for (const auto& row : j.at("strata")) {
      std::vector<std::uint8_t> z;
      for (const auto& b : row) z.push_back(static_cast<std::uint8_t>(b.get<int>()));
      s.strata.push_back(std::move(z));
    }
    s.p_z = j.at("p_z").get<std::vector<double>>();
    s.p_x_given_z = j.at("p_x_given_z").get<std::vector<double>>();
    for (const auto& cell : j.at("p_y_given_xz")) {
      s.p_y_given_xz.push_back({cell.at(0).get<double>(), cell.at(1).get<double>()});
    }
    s.source_rows = j.value("source_rows", std::size_t{0});
    if (j.contains("cell_rows")) {
      for (const auto& cell : j.at("cell_rows")) {
        s.cell_rows.push_back(
            {cell.at(0).get<std::size_t>(), cell.at(1).get<std::size_t>()});
      }
    }
    if (j.contains("provenance")) {
      s.provenance = j.at("provenance").get<std::vector<std::string>>();
    }
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario file: ") + e.what());
  }
  s.Validate();
  return s;
}

void SaveScenario(const Scenario& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ScenarioError("cannot write " + path.string());
  out << ScenarioToJson(s).dump(2) << '\n';
  if (!out) throw ScenarioError("write failed: " + path.string());
}

Scenario LoadScenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open " + path.string());
  try {
    return ScenarioFromJson(json::parse(in));
  } catch (const json::exception& e) {
    throw ScenarioError(path.string() + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Datasets

SimulatedDataset SimulatedDataset::Subset(
    std::span<const std::uint32_t> indices) const {
  SimulatedDataset out;
  out.confounder_names = confounder_names;
  out.num_confounders = num_confounders;
  out.seed = seed;
  const std::size_t d = num_confounders;
  const bool has_strata = !stratum.empty();
  if (has_strata) out.stratum.resize(indices.size());
  out.x.resize(indices.size());
  out.y.resize(indices.size());
  out.z.resize(indices.size() * d);
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::uint32_t r = indices[i];
    if (has_strata) out.stratum[i] = stratum[r];
    out.x[i] = x[r];
    out.y[i] = y[r];
    std::copy_n(z.begin() + static_cast<std::ptrdiff_t>(r * d), d,
                out.z.begin() + static_cast<std::ptrdiff_t>(i * d));
  }
  return out;
}

std::uint64_t DatasetHash(const SimulatedDataset& d) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto feed = [&h](std::uint8_t byte) {
    h ^= byte;
    h *= 0x100000001b3ULL;
  };
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (const auto b : d.z_row(i)) feed(b);
    feed(d.x[i]);
    feed(d.y[i]);
  }
  return h;
}

void WriteDatasetCsv(const SimulatedDataset& d,
                     const std::filesystem::path& p) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  const bool has_strata = !d.stratum.empty();
  std::string header = has_strata ? "stratum," : "";
  for (std::size_t j = 0; j < d.num_confounders; ++j) {
    const std::string name = j < d.confounder_names.size()
                                 ? d.confounder_names[j]
                                 : fmt::format("z{}", j + 1);
    header += CsvEscape(name) + ",";
  }
  out << header << "x,y\n";
  std::string line;
  for (std::size_t i = 0; i < d.size(); ++i) {
    line.clear();
    if (has_strata) line += std::to_string(d.stratum[i]) + ",";
    for (const auto b : d.z_row(i)) {
      line.push_back(b ? '1' : '0');
      line.push_back(',');
    }
    line.push_back(d.x[i] ? '1' : '0');
    line.push_back(',');
    line.push_back(d.y[i] ? '1' : '0');
    out << line << '\n';
  }
  if (!out) throw Error("write failed: " + p.string());
}

SimulatedDataset ReadDatasetCsv(const std::filesystem::path& p) {
  const CsvTable t = ReadCsvFile(p);
  const std::size_t x_col = RequireColumn(t, "x");
  const std::size_t y_col = RequireColumn(t, "y");
  const auto s_col = t.ColumnIndex("stratum");
  std::vector<std::size_t> z_cols;
  SimulatedDataset d;
  for (std::size_t c = 0; c < t.header.size(); ++c) {
    if (c == x_col || c == y_col || (s_col && c == *s_col)) continue;
    z_cols.push_back(c);
    d.confounder_names.push_back(t.header[c]);
  }
  d.num_confounders = z_cols.size();
  const std::size_t n = t.rows.size();
  d.x.resize(n);
  d.y.resize(n);
  d.z.resize(n * z_cols.size());
  if (s_col) d.stratum.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = t.rows[i];
    d.x[i] = CodeBinary({"x", {}}, row[x_col], i);
    d.y[i] = CodeBinary({"y", {}}, row[y_col], i);
    for (std::size_t j = 0; j < z_cols.size(); ++j) {
      d.z[i * z_cols.size() + j] =
          CodeBinary({t.header[z_cols[j]], {}}, row[z_cols[j]], i);
    }
    if (s_col) {
      d.stratum[i] =
          static_cast<std::uint32_t>(RequireNumber(row[*s_col], "stratum", i));
    }
  }
  return d;
}

}  // namespace atebench
