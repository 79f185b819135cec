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

// atebench command-line tool. Exit status: 0 success, 1 usage error,
// 2 runtime failure.

#include <fmt/format.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "atebench/bootstrap.h"
#include "atebench/errors.h"
#include "atebench/estimators.h"
#include "atebench/harness.h"
#include "atebench/report.h"
#include "atebench/scenario.h"
#include "json.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace atebench {
namespace {

constexpr int kUsageError = 1;
constexpr int kRuntimeError = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

// key=value; the value is parsed as JSON when possible, else kept as text.
void ApplyOverride(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw UsageError(fmt::format("override '{}' is not key=value", assignment));
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }
  json* target = &j;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (dot == std::string::npos) {
      (*target)[part] = value;
      return;
    }
    target = &(*target)[part];
    start = dot + 1;
  }
}

std::string ResultJson(const EstimateResult& r, const std::string& label,
                       std::size_t n) {
  json j{{"estimator", label},
         {"n", n},
         {"point", r.point},
         {"kind", std::string(IntervalKindName(r.kind))},
         {"wall_time_s", r.wall_time_s}};
  if (r.kind != IntervalKind::kNone) {
    j["lo"] = r.lo;
    j["hi"] = r.hi;
  }
  if (r.kind == IntervalKind::kBootstrapPercentile) j["redraws"] = r.redraw_count;
  return j.dump(2);
}

}  // namespace
}  // namespace atebench

int main(int argc, char** argv) {
  using namespace atebench;

  CLI::App app{"Average treatment effect simulation and estimation benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "atebench 1.0");

  std::uint64_t seed = kDefaultSeed;
  std::size_t workers = 1;
  std::string format = "csv";

  // scenario-build
  auto* build = app.add_subcommand("scenario-build",
                                   "Build a scenario file from an ingestion config");
  std::string build_config, build_out;
  build->add_option("--config", build_config, "Ingestion config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  build->add_option("--out", build_out, "Scenario file to write")->required();

  // scenario-truth
  auto* truth = app.add_subcommand("scenario-truth", "Print the true ATE");
  std::string truth_path;
  int digits = 3;
  truth->add_option("--scenario,--config", truth_path,
                    "Scenario file or ingestion config")
      ->required()
      ->check(CLI::ExistingFile);
  truth->add_option("--digits", digits, "Decimal places")->check(CLI::Range(0, 17));

  // simulate
  auto* simulate = app.add_subcommand("simulate", "Draw one dataset");
  std::string sim_scenario, sim_out;
  std::size_t sim_n = 0;
  simulate->add_option("--scenario,--config", sim_scenario,
                       "Scenario file or ingestion config")
      ->required()
      ->check(CLI::ExistingFile);
  simulate->add_option("--n", sim_n, "Rows")->required()->check(CLI::PositiveNumber);
  simulate->add_option("--out", sim_out, "Output CSV")->required();
  simulate->add_option("--seed", seed, "Random seed");

  // estimate
  auto* estimate = app.add_subcommand("estimate", "Estimate the ATE on one dataset");
  std::string est_data, est_strategy = "gcomp", est_model, est_endpoint;
  std::size_t est_boot = 599;
  double est_level = 0.95;
  estimate->add_option("--data", est_data, "Dataset CSV")
      ->required()
      ->check(CLI::ExistingFile);
  estimate->add_option("--strategy", est_strategy,
                       "crude | gcomp | gcomp2 | iptw | external-direct")
      ->check(CLI::IsMember({"crude", "gcomp", "gcomp2", "tlearner", "iptw",
                             "external-direct"}));
  estimate->add_option("--model", est_model, "logistic | boosted-trees | external")
      ->check(CLI::IsMember({"logistic", "boosted-trees", "external"}));
  estimate->add_option("--bootstrap", est_boot, "Bootstrap iterations (0: none)");
  estimate->add_option("--level", est_level, "Interval level")
      ->check(CLI::Range(0.0, 1.0));
  estimate->add_option("--endpoint", est_endpoint, "stdio:<cmd> or tcp:<host>:<port>");
  estimate->add_option("--seed", seed, "Bootstrap seed");
  estimate->add_option("--workers", workers, "Bootstrap worker threads")
      ->check(CLI::PositiveNumber);

  // study-run
  auto* study = app.add_subcommand("study-run", "Run a Monte Carlo study");
  std::string study_config, study_out = "study_out";
  std::vector<std::string> overrides;
  std::optional<std::uint64_t> study_seed;
  std::optional<std::size_t> study_workers, study_boot;
  std::optional<double> study_level;
  std::string study_endpoint;
  bool quiet = false;
  study->add_option("--config", study_config, "Study config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  study->add_option("--out-dir", study_out, "Directory for metrics, timing, audit");
  study->add_option("--set", overrides, "Config override key=value (repeatable)");
  study->add_option("--seed", study_seed, "Base seed (overrides config)");
  study->add_option("--workers", study_workers, "Worker threads")
      ->check(CLI::PositiveNumber);
  study->add_option("--bootstrap", study_boot, "Bootstrap iterations (0: none)");
  study->add_option("--level", study_level, "Interval level")
      ->check(CLI::Range(0.0, 1.0));
  study->add_option("--endpoint", study_endpoint, "Endpoint for external estimators");
  study->add_option("--format", format, "Stdout format: csv | json | table")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  study->add_flag("--quiet", quiet, "No progress lines");

  // report
  auto* report = app.add_subcommand("report", "Re-render a metrics file");
  std::string report_in, report_out;
  report->add_option("--input", report_in, "metrics.csv or metrics.json")
      ->required()
      ->check(CLI::ExistingFile);
  report->add_option("--format", format, "csv | json | table")
      ->check(CLI::IsMember({"csv", "json", "table"}));
  report->add_option("--out", report_out, "Write here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    if (*build) {
      const Scenario s = BuildScenario(Ingest(LoadIngestionConfig(build_config)));
      SaveScenario(s, build_out);
      std::cout << fmt::format("{}: K={} strata, n={} rows, true ATE {:.6f}\n", s.name,
                               s.num_strata(), s.source_rows, TrueAte(s));
      for (const auto& line : s.provenance) std::cerr << line << '\n';
    } else if (*truth) {
      const Scenario s = LoadOrBuildScenario(truth_path);
      std::cout << fmt::format("{:.{}f}\n", TrueAte(s), digits);
    } else if (*simulate) {
      const Scenario s = LoadOrBuildScenario(sim_scenario);
      WriteDatasetCsv(Simulate(s, sim_n, seed), sim_out);
    } else if (*estimate) {
      std::string label = est_strategy;
      if (!est_model.empty()) label += "+" + est_model;
      EstimatorSpec spec;
      try {
        spec = EstimatorSpec::Parse(label, est_endpoint);
      } catch (const std::invalid_argument& e) {
        throw UsageError(e.what());
      }
      const SimulatedDataset d = ReadDatasetCsv(est_data);
      std::optional<BootstrapConfig> boot;
      if (est_boot > 0) {
        boot = BootstrapConfig{};
        boot->iterations = est_boot;
        boot->level = est_level;
        boot->seed = seed;
        boot->workers = workers;
      }
      const Estimator est(spec);
      std::cout << ResultJson(est.Run(d, boot), spec.Label(), d.size()) << '\n';
    } else if (*study) {
      json j = ReadJson(study_config);
      for (const auto& o : overrides) ApplyOverride(j, o);
      if (study_seed) j["base_seed"] = *study_seed;
      if (study_workers) j["workers"] = *study_workers;
      if (study_boot) j["bootstrap"]["iterations"] = *study_boot;
      if (study_level) j["bootstrap"]["level"] = *study_level;
      if (!study_endpoint.empty()) j["endpoint"] = study_endpoint;
      const StudyConfig cfg =
          StudyConfigFromJson(j, fs::path(study_config).parent_path());
      const Scenario s = LoadOrBuildScenario(cfg.scenario);
      fs::create_directories(study_out);
      std::ofstream audit(fs::path(study_out) / "audit.jsonl");
      if (!audit) throw Error("cannot write audit log in " + study_out);
      RunHooks hooks;
      hooks.audit = &audit;
      hooks.progress = quiet ? nullptr : &std::cerr;
      const StudyResult r = RunStudy(cfg, s, hooks);
      WriteReportFile(r, ReportFormat::kCsv, fs::path(study_out) / "metrics.csv");
      WriteReportFile(r, ReportFormat::kJson, fs::path(study_out) / "metrics.json");
      {
        std::ofstream timing(fs::path(study_out) / "timing.csv");
        WriteTimingCsv(r, timing);
      }
      WriteReport(r, ParseReportFormat(format), std::cout);
    } else if (*report) {
      const StudyResult r = ReadMetricsFile(report_in);
      if (report_out.empty()) {
        WriteReport(r, ParseReportFormat(format), std::cout);
      } else {
        WriteReportFile(r, ParseReportFormat(format), report_out);
      }
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}
