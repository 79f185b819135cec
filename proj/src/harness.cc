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

#include "atebench/harness.h"

#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>

#include "atebench/errors.h"
#include "atebench/parallel.h"
#include "atebench/rng.h"

namespace atebench {

using nlohmann::json;

namespace {

constexpr std::uint64_t kDatasetStream = 0x4441544153455453ULL;    // "DATASETS"
constexpr std::uint64_t kBootstrapStream = 0x424f4f5453545250ULL;  // "BOOTSTRP"

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const json::exception& e) {
    throw Error(fmt::format("{}: {}", path.string(), e.what()));
  }
}

template <typename T>
T Get(const json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception& e) {
    throw Error(fmt::format("study config key '{}': {}", key, e.what()));
  }
}

struct Outcome {
  EstimateResult result;
  std::string error;  // non-empty on failure
};

}  // namespace

void StudyConfig::Validate() const {
  if (replicates < 1) throw Error("replicates must be >= 1");
  if (sample_sizes.empty()) throw Error("sample_sizes is empty");
  for (const auto n : sample_sizes) {
    if (n < 2) throw Error(fmt::format("sample size {} < 2", n));
  }
  if (estimators.empty()) throw Error("no estimators configured");
  for (const auto& e : estimators) e.Validate();
  if (bootstrap) bootstrap->Validate();
  if (workers < 1) throw Error("workers must be >= 1");
  estimator_options.trees.Validate();
}

StudyConfig StudyConfigFromJson(const json& j, const std::filesystem::path& base_dir) {
  if (!j.is_object()) throw Error("study config must be a JSON object");
  StudyConfig cfg;
  const auto scenario = Get<std::string>(j, "scenario", "");
  if (scenario.empty()) throw Error("study config needs 'scenario'");
  cfg.scenario = std::filesystem::path(scenario);
  if (cfg.scenario.is_relative()) cfg.scenario = base_dir / cfg.scenario;
  cfg.sample_sizes = Get(j, "sample_sizes", cfg.sample_sizes);
  cfg.replicates = Get(j, "replicates", cfg.replicates);
  cfg.base_seed = Get(j, "base_seed", cfg.base_seed);
  cfg.workers = Get(j, "workers", cfg.workers);
  cfg.estimator_options.pool_size = Get(j, "pool_size", cfg.estimator_options.pool_size);

  const auto parallelism = Get<std::string>(j, "parallelism", "replicate");
  if (parallelism == "replicate") {
    cfg.parallelism = Parallelism::kReplicate;
  } else if (parallelism == "bootstrap") {
    cfg.parallelism = Parallelism::kBootstrap;
  } else {
    throw Error(fmt::format("parallelism '{}' is not replicate|bootstrap", parallelism));
  }

  if (const auto b = j.find("bootstrap"); b != j.end() && !b->is_null()) {
    BootstrapConfig bc;
    bc.iterations = Get(*b, "iterations", bc.iterations);
    bc.level = Get(*b, "level", bc.level);
    if (b->contains("max_redraws")) {
      bc.max_redraws = Get<std::size_t>(*b, "max_redraws", 0);
    }
    if (bc.iterations == 0) {
      cfg.bootstrap.reset();
    } else {
      cfg.bootstrap = bc;
    }
  }
  if (const auto t = j.find("boosted_trees"); t != j.end()) {
    auto& tc = cfg.estimator_options.trees;
    tc.learning_rate = Get(*t, "learning_rate", tc.learning_rate);
    tc.max_depth = Get(*t, "max_depth", tc.max_depth);
    tc.rounds = Get(*t, "rounds", tc.rounds);
    tc.min_child_weight = Get(*t, "min_child_weight", tc.min_child_weight);
    tc.l2_penalty = Get(*t, "l2_penalty", tc.l2_penalty);
  }
  if (const auto l = j.find("logistic"); l != j.end()) {
    if (l->contains("clip_epsilon") && !(*l)["clip_epsilon"].is_null()) {
      cfg.estimator_options.logistic.clip_epsilon = Get(*l, "clip_epsilon", 0.0);
    }
  }

  const auto endpoint = Get<std::string>(j, "endpoint", "");
  const auto labels =
      Get<std::vector<std::string>>(j, "estimators", {"crude", "gcomp+logistic",
                                                      "iptw+logistic"});
  for (const auto& label : labels) {
    try {
      cfg.estimators.push_back(EstimatorSpec::Parse(label, endpoint));
    } catch (const std::invalid_argument& e) {
      throw Error(fmt::format("estimator '{}': {}", label, e.what()));
    }
  }
  cfg.Validate();
  return cfg;
}

StudyConfig LoadStudyConfig(const std::filesystem::path& path) {
  return StudyConfigFromJson(ReadJsonFile(path), path.parent_path());
}

Scenario LoadOrBuildScenario(const std::filesystem::path& path) {
  const json j = ReadJsonFile(path);
  if (j.contains("schema")) return ScenarioFromJson(j);
  return BuildScenario(Ingest(IngestionConfigFromJson(j, path.parent_path())));
}

double CoverageOf(std::span<const EstimateResult> results, double target) {
  if (results.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::size_t hit = 0;
  for (const auto& r : results) hit += r.lo <= target && target <= r.hi;
  return static_cast<double>(hit) / static_cast<double>(results.size());
}

StudyMetrics ComputeMetrics(std::span<const EstimateResult> results, double truth,
                            std::size_t failures) {
  StudyMetrics m;
  m.failures = failures;
  m.replicates = results.size();
  if (results.empty()) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    m.coverage = m.mean_width = m.bias_eliminated_coverage = nan;
    m.mean_error = m.mse = m.mean_time_s = m.mc_se_coverage = nan;
    return m;
  }
  const auto R = static_cast<double>(results.size());
  double width = 0.0, error = 0.0, squared = 0.0, time = 0.0;
  for (const auto& r : results) {
    width += r.hi - r.lo;
    error += r.point - truth;
    squared += (r.point - truth) * (r.point - truth);
    time += r.wall_time_s;
    m.redraws += r.redraw_count;
  }
  m.mean_width = width / R;
  m.mean_error = error / R;
  m.mse = squared / R;
  m.mean_time_s = time / R;
  m.coverage = CoverageOf(results, truth);
  m.bias_eliminated_coverage = CoverageOf(results, truth + m.mean_error);
  m.mc_se_coverage = std::sqrt(m.coverage * (1.0 - m.coverage) / R);
  return m;
}

std::uint64_t DatasetSeed(std::uint64_t base_seed, std::size_t n,
                          std::size_t replicate) {
  return DeriveKey(base_seed, {kDatasetStream, n, replicate});
}

std::uint64_t BootstrapSeed(std::uint64_t base_seed, std::size_t n,
                            std::size_t replicate) {
  return DeriveKey(base_seed, {kBootstrapStream, n, replicate});
}

StudyResult RunStudy(const StudyConfig& cfg, const Scenario& scenario,
                     const RunHooks& hooks) {
  cfg.Validate();
  scenario.Validate();
  std::vector<Estimator> estimators;
  for (const auto& spec : cfg.estimators) {
    estimators.emplace_back(spec, cfg.estimator_options);
  }

  StudyResult out;
  out.scenario = scenario.name;
  out.truth = TrueAte(scenario);
  const std::size_t E = estimators.size();
  const bool replicate_level = cfg.parallelism == Parallelism::kReplicate;

  for (const std::size_t n : cfg.sample_sizes) {
    // outcomes[r * E + e]
    std::vector<Outcome> outcomes(cfg.replicates * E);
    std::vector<std::uint64_t> hashes(cfg.replicates);

    const auto run_replicate = [&](std::size_t rep) {
      const SimulatedDataset d = Simulate(scenario, n, DatasetSeed(cfg.base_seed, n, rep));
      hashes[rep] = DatasetHash(d);
      std::optional<BootstrapConfig> boot = cfg.bootstrap;
      if (boot) {
        boot->seed = BootstrapSeed(cfg.base_seed, n, rep);
        boot->workers = replicate_level ? 1 : cfg.workers;
      }
      for (std::size_t e = 0; e < E; ++e) {
        Outcome& o = outcomes[rep * E + e];
        try {
          o.result = estimators[e].Run(d, boot);
        } catch (const Error& err) {
          o.error = err.what();
          if (o.error.empty()) o.error = "unknown failure";
        }
      }
    };
    ParallelFor(cfg.replicates, replicate_level ? cfg.workers : 1, run_replicate);

    for (std::size_t e = 0; e < E; ++e) {
      std::vector<EstimateResult> ok;
      std::size_t failures = 0;
      for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
        const Outcome& o = outcomes[rep * E + e];
        if (o.error.empty()) {
          ok.push_back(o.result);
        } else {
          ++failures;
        }
      }
      out.cells.push_back({n, estimators[e].Label(), ComputeMetrics(ok, out.truth, failures)});
      if (hooks.progress) {
        const auto& m = out.cells.back().metrics;
        *hooks.progress << fmt::format(
            "n={} {}: coverage {:.1f}% width {:.4f} ME {:.5f} MSE {:.6f} failures {}\n",
            n, estimators[e].Label(), 100 * m.coverage, m.mean_width, m.mean_error,
            m.mse, m.failures);
        hooks.progress->flush();
      }
    }

    if (hooks.audit) {
      for (std::size_t rep = 0; rep < cfg.replicates; ++rep) {
        for (std::size_t e = 0; e < E; ++e) {
          const Outcome& o = outcomes[rep * E + e];
          json rec{{"n", n},
                   {"replicate", rep},
                   {"estimator", estimators[e].Label()},
                   {"dataset_seed", DatasetSeed(cfg.base_seed, n, rep)},
                   {"dataset_hash", fmt::format("{:016x}", hashes[rep])},
                   {"truth", out.truth}};
          if (o.error.empty()) {
            rec["point"] = o.result.point;
            rec["lo"] = o.result.lo;
            rec["hi"] = o.result.hi;
            rec["kind"] = std::string(IntervalKindName(o.result.kind));
            rec["wall_time_s"] = o.result.wall_time_s;
            rec["redraws"] = o.result.redraw_count;
            rec["error"] = nullptr;
          } else {
            rec["error"] = o.error;
          }
          *hooks.audit << rec.dump() << '\n';
        }
      }
      hooks.audit->flush();
    }
  }
  return out;
}

}  // namespace atebench
