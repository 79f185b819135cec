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

// Acceptance suite. One PASS/FAIL line per criterion on stdout; per-cell
// diagnostics on stderr.
//
//   acceptance [criterion...] [--workers N]
//
// With no criterion every one runs. Exit status is 0 iff all selected
// criteria pass.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "atebench/boosted_trees.h"
#include "atebench/bootstrap.h"
#include "atebench/estimators.h"
#include "atebench/harness.h"
#include "atebench/logistic.h"
#include "atebench/parallel.h"
#include "atebench/report.h"
#include "atebench/rng.h"
#include "atebench/scenario.h"
#include "test_support.h"

namespace fs = std::filesystem;
using namespace atebench;

namespace {

// Tolerances.
constexpr double kIndoAteTol = 0.002;
constexpr double kRottAteTol = 0.003;
constexpr double kCoverageTolPts = 2.0;
constexpr double kMeanErrorTol = 3e-3;
constexpr double kMseRelTol = 0.20;
constexpr double kCrudeMaxCov200 = 80.0;
constexpr double kCrudeMaxCov1000 = 25.0;
constexpr double kCrudeMinBeCov = 92.0;
constexpr double kIptwRottMaxCov = 80.0;
constexpr double kOracleAbsTol = 1e-12;
constexpr double kLargeSampleTol = 0.005;
constexpr double kCalibLo = 0.93;
constexpr double kCalibHi = 0.97;
constexpr double kScoreTol = 1e-6;
constexpr double kLossSlack = 1e-12;

// Study sizes.
constexpr std::size_t kReplicates = 1000;
constexpr std::size_t kBootstrapB = 599;

const fs::path kRoot = ATEBENCH_SOURCE_DIR;
std::size_t g_workers = std::max(1u, std::thread::hardware_concurrency());

struct Verdict {
  bool pass;
  std::string detail;
};

// Reference rows: coverage %, ME x1e3, MSE x1e3.
struct Reference {
  std::size_t n;
  const char* estimator;
  double coverage;
  double me;
  double mse;
};

StudyResult Study(const fs::path& scenario, std::vector<std::size_t> sizes,
                  std::vector<std::string> labels) {
  StudyConfig cfg;
  cfg.scenario = scenario;
  cfg.sample_sizes = std::move(sizes);
  cfg.replicates = kReplicates;
  for (const auto& l : labels) cfg.estimators.push_back(EstimatorSpec::Parse(l));
  cfg.bootstrap = BootstrapConfig{};
  cfg.bootstrap->iterations = kBootstrapB;
  cfg.workers = g_workers;
  RunHooks hooks;
  hooks.progress = &std::cerr;
  return RunStudy(cfg, LoadOrBuildScenario(scenario), hooks);
}

const StudyMetrics& Cell(const StudyResult& r, std::size_t n, const std::string& label) {
  for (const auto& c : r.cells) {
    if (c.sample_size == n && c.estimator == label) return c.metrics;
  }
  throw std::runtime_error(fmt::format("no cell n={} {}", n, label));
}

Verdict ScenarioTruth() {
  const Scenario indo = LoadOrBuildScenario(kRoot / "configs/indomethacin.json");
  const Scenario rott = LoadOrBuildScenario(kRoot / "configs/rotterdam.json");
  const double ti = TrueAte(indo), tr = TrueAte(rott);
  const bool ok_i = indo.num_strata() == 14 && indo.source_rows == 570 &&
                    std::abs(ti - (-0.062)) <= kIndoAteTol;
  const bool ok_r = rott.num_strata() == 98 && rott.source_rows == 2260 &&
                    std::abs(tr - (-0.101)) <= kRottAteTol;
  return {ok_i && ok_r,
          fmt::format("indomethacin K={} n={} ate={:.6f} (want 14/570/-0.062+-{}); "
                      "rotterdam K={} n={} ate={:.6f} (want 98/2260/-0.101+-{})",
                      indo.num_strata(), indo.source_rows, ti, kIndoAteTol,
                      rott.num_strata(), rott.source_rows, tr, kRottAteTol)};
}

Verdict IndomethacinGlm() {
  const Reference refs[] = {
      {200, "gcomp+logistic", 94.5, 5.49, 2.84}, {500, "gcomp+logistic", 94.7, 7.59, 1.15},
      {1000, "gcomp+logistic", 94.5, 6.84, 0.54}, {200, "iptw+logistic", 94.9, 4.78, 2.91},
      {500, "iptw+logistic", 94.6, 5.83, 1.15},  {1000, "iptw+logistic", 94.7, 5.22, 0.53},
  };
  const auto r = Study(kRoot / "configs/indomethacin.json", {200, 500, 1000},
                       {"gcomp+logistic", "iptw+logistic"});
  std::size_t failed = 0;
  std::string misses;
  for (const auto& ref : refs) {
    const auto& m = Cell(r, ref.n, ref.estimator);
    const double cov = 100 * m.coverage, me = 1e3 * m.mean_error, mse = 1e3 * m.mse;
    const bool c_ok = std::abs(cov - ref.coverage) <= kCoverageTolPts;
    const bool e_ok = std::abs(me - ref.me) <= 1e3 * kMeanErrorTol;
    const bool s_ok = std::abs(mse / ref.mse - 1) <= kMseRelTol;
    std::cerr << fmt::format(
        "  n={:<5} {:<15} cov {:5.1f} ({:4.1f}) {}  ME {:6.2f} ({:5.2f}) {}  MSE {:5.2f} "
        "({:4.2f}) {}  failures {}\n",
        ref.n, ref.estimator, cov, ref.coverage, c_ok ? "ok" : "MISS", me, ref.me,
        e_ok ? "ok" : "MISS", mse, ref.mse, s_ok ? "ok" : "MISS", m.failures);
    const int cell_misses = !c_ok + !e_ok + !s_ok;
    failed += cell_misses;
    if (cell_misses) {
      misses += fmt::format(" [n={} {}: cov {:.1f} ME {:.2f} MSE {:.2f}]", ref.n,
                            ref.estimator, cov, me, mse);
    }
  }
  return {failed == 0,
          fmt::format("{} of 18 checks outside tolerance (cov +-{} pts, ME +-{}, MSE +-{:.0f}%){}",
                      failed, kCoverageTolPts, kMeanErrorTol, 100 * kMseRelTol, misses)};
}

Verdict CrudeDegradation() {
  const auto r = Study(kRoot / "configs/indomethacin.json", {200, 500, 1000}, {"crude"});
  bool ok = true;
  std::string detail;
  for (const std::size_t n : {200, 500, 1000}) {
    const auto& m = Cell(r, n, "crude");
    const double cov = 100 * m.coverage, be = 100 * m.bias_eliminated_coverage;
    ok = ok && be >= kCrudeMinBeCov;
    if (n == 200) ok = ok && cov <= kCrudeMaxCov200;
    if (n == 1000) ok = ok && cov <= kCrudeMaxCov1000;
    detail += fmt::format("n={} cov {:.1f} BE {:.1f}; ", n, cov, be);
  }
  detail += fmt::format("need cov<={} at 200, <={} at 1000, BE>={}", kCrudeMaxCov200,
                        kCrudeMaxCov1000, kCrudeMinBeCov);
  return {ok, detail};
}

Verdict RotterdamGlmSpot() {
  const auto r = Study(kRoot / "configs/rotterdam.json", {1000},
                       {"gcomp+logistic", "iptw+logistic"});
  const auto& g = Cell(r, 1000, "gcomp+logistic");
  const auto& w = Cell(r, 1000, "iptw+logistic");
  const double gcov = 100 * g.coverage, gme = 1e3 * g.mean_error, wcov = 100 * w.coverage;
  const bool ok = std::abs(gcov - 95.4) <= kCoverageTolPts &&
                  std::abs(gme - (-4.37)) <= 1e3 * kMeanErrorTol && wcov <= kIptwRottMaxCov;
  return {ok, fmt::format("gcomp cov {:.1f} (95.4+-{}) ME {:.2f}e-3 (-4.37+-3); "
                          "iptw cov {:.1f} (<= {}) ME {:.2f}e-3",
                          gcov, kCoverageTolPts, gme, wcov, kIptwRottMaxCov,
                          1e3 * w.mean_error)};
}

// Every dataset in which each (z, x) cell holds between 1 and max_rows rows,
// over every outcome count per cell.
std::size_t EnumerateOccupied(std::size_t d, std::size_t max_rows,
                              const std::function<void(const SimulatedDataset&)>& fn) {
  const std::size_t cells = std::size_t{2} << d;  // 2^d strata x 2 arms
  std::vector<std::pair<std::size_t, std::size_t>> options;  // (rows, positives)
  for (std::size_t r = 1; r <= max_rows; ++r) {
    for (std::size_t y = 0; y <= r; ++y) options.emplace_back(r, y);
  }
  std::vector<std::size_t> pick(cells, 0);
  std::size_t count = 0;
  for (;;) {
    SimulatedDataset ds;
    ds.num_confounders = d;
    for (std::size_t j = 0; j < d; ++j) ds.confounder_names.push_back("z" + std::to_string(j));
    for (std::size_t c = 0; c < cells; ++c) {
      const auto [rows, pos] = options[pick[c]];
      const std::size_t stratum = c >> 1;
      for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < d; ++j) ds.z.push_back((stratum >> j) & 1);
        ds.x.push_back(c & 1);
        ds.y.push_back(i < pos);
      }
    }
    fn(ds);
    ++count;
    std::size_t c = 0;
    while (c < cells && ++pick[c] == options.size()) pick[c++] = 0;
    if (c == cells) return count;
  }
}

Verdict OracleEquivalences() {
  double worst = 0.0;
  std::size_t datasets = 0;
  const auto check = [&](const SimulatedDataset& ds) {
    const double a = EstimateGcomp(ds, testing::CellMeanFactory()).ate;
    worst = std::max(worst, std::abs(a - testing::BruteForceStandardization(ds)));
  };
  datasets += EnumerateOccupied(0, 6, check);  // K=1
  datasets += EnumerateOccupied(1, 3, check);  // K=2
  datasets += EnumerateOccupied(2, 2, check);  // K=4
  // Random occupied datasets up to n=50.
  std::mt19937_64 gen(11);
  for (int t = 0; t < 20000; ++t) {
    const std::size_t d = gen() % 3;
    const std::size_t n = (std::size_t{2} << d) + gen() % (51 - (std::size_t{2} << d));
    SimulatedDataset ds = testing::RandomDataset(gen(), n, d);
    try {
      testing::BruteForceStandardization(ds);
    } catch (const std::runtime_error&) {
      continue;  // some cell empty
    }
    check(ds);
    ++datasets;
  }
  const bool sat_ok = worst <= kOracleAbsTol;

  const Scenario s = LoadOrBuildScenario(kRoot / "configs/indomethacin.json");
  const auto big = Simulate(s, 1000000, kDefaultSeed);
  std::vector<double> e(big.size());
  for (std::size_t i = 0; i < big.size(); ++i) e[i] = s.p_x_given_z[big.stratum[i]];
  const double iptw_gap = std::abs(IptwFromPropensities(big, e).ate - TrueAte(s));
  const bool iptw_ok = iptw_gap <= kLargeSampleTol;

  bool const_ok = true;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto ds = testing::RandomDataset(seed, 50 + seed * 7, 1 + seed % 5);
    try {
      const std::vector<double> half(ds.size(), 0.5);
      const_ok = const_ok && IptwFromPropensities(ds, half).ate == EstimateCrude(ds).ate;
    } catch (const EmptyArmError&) {
    }
  }
  return {sat_ok && iptw_ok && const_ok,
          fmt::format("saturated gcomp vs brute force on {} datasets: max |diff| {:.1e} "
                      "(<= {:.0e}); oracle IPTW n=1e6 |err| {:.5f} (<= {}); "
                      "constant-propensity IPTW == crude: {}",
                      datasets, worst, kOracleAbsTol, iptw_gap, kLargeSampleTol,
                      const_ok ? "yes" : "no")};
}

Verdict BootstrapCalibration() {
  const auto ranks = PercentileRankPair(kBootstrapB, 0.95);
  const ScalarEstimator mean = [](const SimulatedDataset& d) {
    double s = 0;
    for (const auto y : d.y) s += y;
    return s / static_cast<double>(d.size());
  };
  std::vector<int> hit(kReplicates, 0);
  ParallelFor(kReplicates, g_workers, [&](std::size_t rep) {
    const Philox rng(DeriveKey(kDefaultSeed, {0xCA11B, rep}));
    SimulatedDataset d;
    for (std::size_t i = 0; i < 1000; ++i) {
      d.x.push_back(0);
      d.y.push_back(rng.Words(0, i)[0] >> 63);
    }
    BootstrapConfig cfg;
    cfg.iterations = kBootstrapB;
    cfg.seed = DeriveKey(kDefaultSeed, {0xB007, rep});
    const auto r = BootstrapCi(d, mean, cfg);
    hit[rep] = r.lo <= 0.5 && 0.5 <= r.hi;
  });
  const double rate = std::accumulate(hit.begin(), hit.end(), 0.0) / kReplicates;
  const bool ok = ranks.lo == 15 && ranks.hi == 585 && rate >= kCalibLo && rate <= kCalibHi;
  return {ok, fmt::format("coverage {:.3f} over {} replicates (want [{}, {}]); ranks ({}, {})",
                          rate, kReplicates, kCalibLo, kCalibHi, ranks.lo, ranks.hi)};
}

Verdict NumericalKernels() {
  double worst_score = 0;
  std::size_t fits = 0, skipped = 0;
  for (std::uint64_t seed = 1; fits < 100; ++seed) {
    const auto d = testing::RandomDataset(seed, 200 + (seed * 131) % 1800, 1 + seed % 6);
    const FeatureMatrix X = OutcomeFeatures(d);
    const auto m = FitLogistic(X, d.y);
    if (m->diagnostics().separation) {
      ++skipped;
      continue;
    }
    const auto p = m->PredictProba(X);
    for (std::size_t j = 0; j <= X.cols; ++j) {
      double s = 0;
      for (std::size_t i = 0; i < X.rows; ++i) s += (d.y[i] - p[i]) * (j ? X(i, j - 1) : 1.0);
      worst_score = std::max(worst_score, std::abs(s));
    }
    ++fits;
  }
  std::size_t increases = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto d = testing::RandomDataset(1000 + seed, 300 + 50 * seed, 1 + seed % 5);
    const auto m = FitBoostedTrees(OutcomeFeatures(d), d.y);
    const auto& loss = m->training_loss();
    for (std::size_t i = 1; i < loss.size(); ++i) increases += loss[i] > loss[i - 1] + kLossSlack;
  }
  return {worst_score < kScoreTol && increases == 0,
          fmt::format("IRLS max |score| {:.2e} over 100 fits (< {:.0e}, {} separated skipped); "
                      "boosted-trees loss increases {} over 20 fits",
                      worst_score, kScoreTol, skipped, increases)};
}

Verdict Determinism() {
  StudyConfig cfg = LoadStudyConfig(kRoot / "configs/study_smoke.json");
  const Scenario s = LoadOrBuildScenario(cfg.scenario);
  const fs::path dir = fs::temp_directory_path() / "atebench_acceptance_determinism";
  fs::create_directories(dir);
  std::vector<std::string> bytes;
  for (const std::size_t workers : {1, 1, 8, 8}) {
    cfg.workers = workers;
    const fs::path out = dir / fmt::format("metrics_{}_{}.csv", workers, bytes.size());
    WriteReportFile(RunStudy(cfg, s), ReportFormat::kCsv, out);
    std::ifstream in(out, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    bytes.push_back(ss.str());
  }
  fs::remove_all(dir);
  const bool ok = std::all_of(bytes.begin(), bytes.end(),
                              [&](const std::string& b) { return b == bytes[0]; }) &&
                  !bytes[0].empty();
  return {ok, fmt::format("4 runs (workers 1,1,8,8) of {} cells: {}", cfg.sample_sizes.size() *
                                                                         cfg.estimators.size(),
                          ok ? "byte-identical" : "differ")};
}

struct Criterion {
  const char* name;
  Verdict (*run)();
};

constexpr Criterion kCriteria[] = {
    {"scenario_truth", ScenarioTruth},
    {"indomethacin_glm", IndomethacinGlm},
    {"crude_degradation", CrudeDegradation},
    {"rotterdam_glm_spot", RotterdamGlmSpot},
    {"oracle_equivalences", OracleEquivalences},
    {"bootstrap_calibration", BootstrapCalibration},
    {"numerical_kernels", NumericalKernels},
    {"determinism", Determinism},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--workers" && i + 1 < argc) {
      g_workers = std::max(1, std::atoi(argv[++i]));
    } else {
      selected.push_back(arg);
    }
  }
  for (const auto& name : selected) {
    if (std::none_of(std::begin(kCriteria), std::end(kCriteria),
                     [&](const Criterion& c) { return name == c.name; })) {
      std::cerr << "unknown criterion " << name << '\n';
      return 2;
    }
  }
  bool all_pass = true;
  for (const auto& c : kCriteria) {
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), c.name) == selected.end()) {
      continue;
    }
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all_pass = all_pass && v.pass;
    std::cout << (v.pass ? "PASS " : "FAIL ") << c.name << ": " << v.detail << std::endl;
  }
  return all_pass ? 0 : 1;
}
