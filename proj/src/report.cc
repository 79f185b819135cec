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

#include "atebench/report.h"

#include <fmt/format.h>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "atebench/csv.h"
#include "atebench/errors.h"
#include "json.hpp"

namespace atebench {

using nlohmann::json;

namespace {

constexpr const char* kCsvColumns =
    "scenario,true_ate,n,estimator,replicates,failures,redraws,coverage_pct,"
    "mc_se_coverage_pct,bias_eliminated_coverage_pct,mean_width_x100,"
    "mean_error_x1e3,mse_x1e3";

std::string Num(double v) { return fmt::format("{:.17g}", v); }

double Field(const CsvTable& t, const std::vector<std::string>& row,
             std::string_view name) {
  const auto idx = t.ColumnIndex(name);
  if (!idx) throw Error(fmt::format("metrics CSV lacks column '{}'", name));
  const auto v = ParseDouble(row[*idx]);
  if (!v) throw Error(fmt::format("bad number '{}' in column '{}'", row[*idx], name));
  return *v;
}

std::string TextField(const CsvTable& t, const std::vector<std::string>& row,
                      std::string_view name) {
  const auto idx = t.ColumnIndex(name);
  if (!idx) throw Error(fmt::format("metrics CSV lacks column '{}'", name));
  return row[*idx];
}

}  // namespace

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  if (name == "table") return ReportFormat::kTable;
  throw Error(fmt::format("unknown format '{}' (csv|json|table)", name));
}

void WriteMetricsCsv(const StudyResult& r, std::ostream& out) {
  out << "# atebench metrics v1\n"
         "# coverage columns in percent; mean_width x100; mean_error and mse "
         "x10^3; mean_error = mean(estimate - truth)\n"
      << kCsvColumns << '\n';
  for (const auto& c : r.cells) {
    const StudyMetrics& m = c.metrics;
    out << CsvEscape(r.scenario) << ',' << Num(r.truth) << ',' << c.sample_size << ','
        << CsvEscape(c.estimator) << ',' << m.replicates << ',' << m.failures << ','
        << m.redraws << ',' << Num(100 * m.coverage) << ','
        << Num(100 * m.mc_se_coverage) << ',' << Num(100 * m.bias_eliminated_coverage)
        << ',' << Num(100 * m.mean_width) << ',' << Num(1e3 * m.mean_error) << ','
        << Num(1e3 * m.mse) << '\n';
  }
}

void WriteTimingCsv(const StudyResult& r, std::ostream& out) {
  out << "scenario,n,estimator,mean_time_s\n";
  for (const auto& c : r.cells) {
    out << CsvEscape(r.scenario) << ',' << c.sample_size << ','
        << CsvEscape(c.estimator) << ',' << Num(c.metrics.mean_time_s) << '\n';
  }
}

void WriteMetricsJson(const StudyResult& r, std::ostream& out) {
  json cells = json::array();
  for (const auto& c : r.cells) {
    const StudyMetrics& m = c.metrics;
    cells.push_back({{"n", c.sample_size},
                     {"estimator", c.estimator},
                     {"replicates", m.replicates},
                     {"failures", m.failures},
                     {"redraws", m.redraws},
                     {"coverage_pct", 100 * m.coverage},
                     {"mc_se_coverage_pct", 100 * m.mc_se_coverage},
                     {"bias_eliminated_coverage_pct", 100 * m.bias_eliminated_coverage},
                     {"mean_width_x100", 100 * m.mean_width},
                     {"mean_error_x1e3", 1e3 * m.mean_error},
                     {"mse_x1e3", 1e3 * m.mse},
                     {"mean_time_s", m.mean_time_s}});
  }
  out << json{{"schema", "atebench.metrics/1"},
              {"scenario", r.scenario},
              {"true_ate", r.truth},
              {"cells", cells}}
             .dump(2)
      << '\n';
}

void WriteMetricsTable(const StudyResult& r, std::ostream& out) {
  out << fmt::format("scenario {}  true ATE {:.4f}\n", r.scenario, r.truth);
  out << fmt::format("{:>6}  {:<24} {:>9} {:>9} {:>9} {:>10} {:>9} {:>9} {:>6}\n", "n",
                     "estimator", "cov %", "width", "BE cov %", "ME x1e3", "MSE x1e3",
                     "time s", "fail");
  for (const auto& c : r.cells) {
    const StudyMetrics& m = c.metrics;
    out << fmt::format(
        "{:>6}  {:<24} {:>9.1f} {:>9.1f} {:>9.1f} {:>10.2f} {:>9.2f} {:>9.3f} {:>6}\n",
        c.sample_size, c.estimator, 100 * m.coverage, 100 * m.mean_width,
        100 * m.bias_eliminated_coverage, 1e3 * m.mean_error, 1e3 * m.mse,
        m.mean_time_s, m.failures);
  }
  out << "width x100; ME = mean(estimate - truth); BE = bias-eliminated\n";
}

void WriteReport(const StudyResult& r, ReportFormat format, std::ostream& out) {
  switch (format) {
    case ReportFormat::kCsv:
      WriteMetricsCsv(r, out);
      break;
    case ReportFormat::kJson:
      WriteMetricsJson(r, out);
      break;
    case ReportFormat::kTable:
      WriteMetricsTable(r, out);
      break;
  }
}

void WriteReportFile(const StudyResult& r, ReportFormat format,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  WriteReport(r, format, out);
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

StudyResult ParseMetricsCsv(std::istream& in) {
  const CsvTable t = ParseCsv(in);
  StudyResult r;
  for (const auto& row : t.rows) {
    r.scenario = TextField(t, row, "scenario");
    r.truth = Field(t, row, "true_ate");
    CellMetrics c;
    c.sample_size = static_cast<std::size_t>(Field(t, row, "n"));
    c.estimator = TextField(t, row, "estimator");
    StudyMetrics& m = c.metrics;
    m.replicates = static_cast<std::size_t>(Field(t, row, "replicates"));
    m.failures = static_cast<std::size_t>(Field(t, row, "failures"));
    m.redraws = static_cast<std::size_t>(Field(t, row, "redraws"));
    m.coverage = Field(t, row, "coverage_pct") / 100;
    m.mc_se_coverage = Field(t, row, "mc_se_coverage_pct") / 100;
    m.bias_eliminated_coverage = Field(t, row, "bias_eliminated_coverage_pct") / 100;
    m.mean_width = Field(t, row, "mean_width_x100") / 100;
    m.mean_error = Field(t, row, "mean_error_x1e3") / 1e3;
    m.mse = Field(t, row, "mse_x1e3") / 1e3;
    r.cells.push_back(std::move(c));
  }
  return r;
}

StudyResult ReadMetricsFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  if (path.extension() != ".json") return ParseMetricsCsv(in);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
  StudyResult r;
  r.scenario = j.value("scenario", "");
  r.truth = j.value("true_ate", 0.0);
  for (const auto& c : j.at("cells")) {
    CellMetrics cell;
    cell.sample_size = c.at("n").get<std::size_t>();
    cell.estimator = c.at("estimator").get<std::string>();
    StudyMetrics& m = cell.metrics;
    m.replicates = c.at("replicates").get<std::size_t>();
    m.failures = c.at("failures").get<std::size_t>();
    m.redraws = c.value("redraws", std::size_t{0});
    m.coverage = c.at("coverage_pct").get<double>() / 100;
    m.mc_se_coverage = c.at("mc_se_coverage_pct").get<double>() / 100;
    m.bias_eliminated_coverage = c.at("bias_eliminated_coverage_pct").get<double>() / 100;
    m.mean_width = c.at("mean_width_x100").get<double>() / 100;
    m.mean_error = c.at("mean_error_x1e3").get<double>() / 1e3;
    m.mse = c.at("mse_x1e3").get<double>() / 1e3;
    m.mean_time_s = c.value("mean_time_s", 0.0);
    r.cells.push_back(std::move(cell));
  }
  return r;
}

}  // namespace atebench
