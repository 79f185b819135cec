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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <filesystem>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "atebench/errors.h"
#include "atebench/scenario.h"
#include "json.hpp"

using namespace atebench;
using nlohmann::json;

namespace {

CsvTable Table(const std::string& text) {
  std::istringstream in(text);
  return ParseCsv(in);
}

IngestionConfig Config(const std::string& text) {
  return IngestionConfigFromJson(json::parse(text), ".");
}

std::vector<std::uint8_t> Column(const PreparedTable& t, std::size_t j) {
  std::vector<std::uint8_t> out;
  for (std::size_t i = 0; i < t.size(); ++i) out.push_back(t.z[i * t.num_confounders() + j]);
  return out;
}

Scenario TwoStrata() {
  Scenario s;
  s.name = "two";
  s.confounder_names = {"z"};
  s.strata = {{0}, {1}};
  s.p_z = {0.5, 0.5};
  s.p_x_given_z = {0.3, 0.6};
  s.p_y_given_xz = {{0.6, 0.8}, {0.2, 0.4}};
  return s;
}

// Random PreparedTable over d binary confounders.
PreparedTable RandomTable(std::uint64_t seed, std::size_t n, std::size_t d) {
  std::mt19937_64 gen(seed);
  std::bernoulli_distribution coin(0.5), rare(0.15);
  PreparedTable t;
  for (std::size_t j = 0; j < d; ++j) t.confounder_names.push_back("c" + std::to_string(j));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) t.z.push_back(coin(gen));
    t.x.push_back(t.z[i * d] ? rare(gen) : coin(gen));
    t.y.push_back(coin(gen));
  }
  return t;
}

}  // namespace

TEST_CASE("median split codes strictly greater values as 1") {
  const auto t = PrepareTable(Table("v,x,y\n1,0,0\n2,1,0\n3,0,1\n4,1,1\n"),
                              Config(R"({"source":"-","outcome":"y","treatment":"x",
                                "confounders":[{"name":"v","kind":"continuous-median-split"}]})"));
  CHECK(Column(t, 0) == std::vector<std::uint8_t>{0, 0, 1, 1});
}

TEST_CASE("median split sends ties to 0") {
  const auto t = PrepareTable(Table("v,x,y\n1,0,0\n2,1,0\n2,0,1\n5,1,1\n2,0,0\n"),
                              Config(R"({"source":"-","outcome":"y","treatment":"x",
                                "confounders":[{"name":"v","kind":"continuous-median-split"}]})"));
  CHECK(Column(t, 0) == std::vector<std::uint8_t>{0, 0, 0, 1, 0});
}

TEST_CASE("categorical collapse maps categories") {
  const auto cfg = Config(R"({"source":"-","outcome":"y","treatment":"x",
      "confounders":[{"name":"c","kind":"categorical-collapse",
                      "collapse_map":{"A":0,"B":1,"C":1}}]})");
  const auto t = PrepareTable(Table("c,x,y\nA,0,0\nC,1,0\nB,0,1\n"), cfg);
  CHECK(Column(t, 0) == std::vector<std::uint8_t>{0, 1, 1});
  CHECK_THROWS_AS(PrepareTable(Table("c,x,y\nA,0,0\nD,1,0\n"), cfg), IngestError);
}

TEST_CASE("ingestion errors") {
  const auto cfg = Config(R"({"source":"-","outcome":"y","treatment":"x",
      "confounders":[{"name":"c"}]})");
  CHECK_THROWS_AS(PrepareTable(Table("c,x\n0,1\n"), cfg), IngestError);
  CHECK_THROWS_AS(PrepareTable(Table("c,x,y\n0,1,2\n"), cfg), IngestError);
  CHECK_THROWS_AS(PrepareTable(Table("c,x,y\n0,yes,1\n"), cfg), IngestError);
  CHECK_THROWS_AS(PrepareTable(Table("c,x,y\n3,1,1\n"), cfg), IngestError);
  CHECK_THROWS_AS(Config(R"({"source":"-","outcome":"y","treatment":"x",
      "confounders":[{"name":"c","kind":"categorical-collapse"}]})"),
                  IngestError);
  CHECK_THROWS_AS(Config(R"({"source":"-","outcome":"y","treatment":"x",
      "confounders":[{"name":"c","kind":"categorical-collapse","collapse_map":{"A":2}}]})"),
                  IngestError);
}

TEST_CASE("row filters run before coding and keep order") {
  const auto cfg = Config(R"({"source":"-",
      "outcome":{"column":"y","coding":{"no":0,"yes":1}},
      "treatment":{"column":"x","coding":{"a":0,"b":1}},
      "row_filters":[{"column":"site","op":"in","values":["s1","s2"]},
                     {"column":"age","op":"ge","value":18}],
      "confounders":[{"name":"age","kind":"continuous-median-split"}]})");
  const auto t = PrepareTable(
      Table("site,age,x,y\ns1,20,a,no\ns3,99,b,yes\ns2,30,b,yes\ns1,10,a,yes\ns2,40,a,no\n"),
      cfg);
  REQUIRE(t.size() == 3);
  CHECK(t.x == std::vector<std::uint8_t>{0, 1, 0});
  CHECK(t.y == std::vector<std::uint8_t>{0, 1, 0});
  // Median of the kept ages {20, 30, 40} is 30.
  CHECK(Column(t, 0) == std::vector<std::uint8_t>{0, 0, 1});
}

TEST_CASE("back-door sum on a hand example") {
  // (0.5*0.8 + 0.5*0.4) - (0.5*0.6 + 0.5*0.2)
  CHECK(TrueAte(TwoStrata()) == doctest::Approx(0.2).epsilon(1e-15));
}

TEST_CASE("true ATE ignores strata order") {
  Scenario s = TwoStrata();
  Scenario r = s;
  std::reverse(r.strata.begin(), r.strata.end());
  std::reverse(r.p_z.begin(), r.p_z.end());
  std::reverse(r.p_x_given_z.begin(), r.p_x_given_z.end());
  std::reverse(r.p_y_given_xz.begin(), r.p_y_given_xz.end());
  CHECK(TrueAte(r) == doctest::Approx(TrueAte(s)).epsilon(1e-15));
}

TEST_CASE("builder keeps every stratum when all have both arms") {
  PreparedTable t;
  t.confounder_names = {"z"};
  t.z = {0, 0, 0, 1, 1, 1, 1, 1};
  t.x = {0, 1, 1, 0, 1, 0, 1, 0};
  t.y = {1, 0, 1, 1, 1, 0, 0, 0};
  const Scenario s = BuildScenario(t);
  REQUIRE(s.num_strata() == 2);
  CHECK(s.source_rows == 8);
  CHECK(s.p_z[0] == 3.0 / 8);
  CHECK(s.p_z[1] == 5.0 / 8);
  CHECK(s.p_x_given_z[0] == 2.0 / 3);
  CHECK(s.p_x_given_z[1] == 2.0 / 5);
  CHECK(s.p_y_given_xz[0][0] == 1.0);
  CHECK(s.p_y_given_xz[0][1] == 0.5);
  CHECK(s.p_y_given_xz[1][0] == 1.0 / 3);
  CHECK(s.p_y_given_xz[1][1] == 0.5);
}

TEST_CASE("builder drops single-arm strata") {
  PreparedTable t;
  t.confounder_names = {"a", "b"};
  t.z = {0, 0, 0, 0, 1, 1, 1, 1, 0, 1};
  t.x = {0, 1, 0, 1, 1};
  t.y = {0, 1, 1, 0, 0};
  const Scenario s = BuildScenario(t);
  CHECK(s.num_strata() == 2);
  CHECK(s.source_rows == 4);
  for (const double p : s.p_x_given_z) CHECK((p > 0 && p < 1));

  PreparedTable none;
  none.confounder_names = {"a"};
  none.z = {0, 1};
  none.x = {1, 0};
  none.y = {0, 0};
  CHECK_THROWS_AS(BuildScenario(none), ScenarioError);
}

TEST_CASE("true ATE equals brute-force standardization of a saturated population") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const PreparedTable t = RandomTable(seed, 400, 3);
    const Scenario s = BuildScenario(t);

    // Oracle: drop strata lacking an arm, then standardize by raw counts.
    std::map<std::vector<std::uint8_t>, std::array<double, 5>> c;  // n, n0, n1, y0, y1
    for (std::size_t i = 0; i < t.size(); ++i) {
      auto& e = c[{t.z.begin() + i * 3, t.z.begin() + i * 3 + 3}];
      e[0] += 1;
      e[1 + t.x[i]] += 1;
      e[3 + t.x[i]] += t.y[i];
    }
    double total = 0, sum = 0;
    for (const auto& [z, e] : c) {
      if (e[1] > 0 && e[2] > 0) total += e[0];
    }
    for (const auto& [z, e] : c) {
      if (e[1] > 0 && e[2] > 0) sum += e[0] / total * (e[4] / e[2] - e[3] / e[1]);
    }
    CHECK(TrueAte(s) == doctest::Approx(sum).epsilon(1e-12));
  }
}

TEST_CASE("scenario invariants are enforced") {
  Scenario s = TwoStrata();
  CHECK_NOTHROW(s.Validate());
  s.p_z = {0.5, 0.5 + 1e-9};
  CHECK_THROWS_AS(s.Validate(), ScenarioError);
  s = TwoStrata();
  s.p_x_given_z[1] = 1.0;
  CHECK_THROWS_AS(s.Validate(), ScenarioError);
  s = TwoStrata();
  s.strata[1] = {0};
  CHECK_THROWS_AS(s.Validate(), ScenarioError);
  s = TwoStrata();
  s.p_y_given_xz[0][1] = 1.5;
  CHECK_THROWS_AS(s.Validate(), ScenarioError);
}

TEST_CASE("simulation is reproducible and consistent with strata") {
  const Scenario s = TwoStrata();
  const SimulatedDataset a = Simulate(s, 1000, 7);
  const SimulatedDataset b = Simulate(s, 1000, 7);
  CHECK(a.x == b.x);
  CHECK(a.y == b.y);
  CHECK(a.z == b.z);
  CHECK(a.stratum == b.stratum);
  CHECK(DatasetHash(a) == DatasetHash(b));
  CHECK(DatasetHash(a) != DatasetHash(Simulate(s, 1000, 8)));
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto z = a.z_row(i);
    CHECK(std::vector<std::uint8_t>(z.begin(), z.end()) == s.strata[a.stratum[i]]);
    CHECK(a.x[i] <= 1);
    CHECK(a.y[i] <= 1);
  }
  // A longer draw extends a shorter one: row i depends only on (seed, i).
  const SimulatedDataset longer = Simulate(s, 1500, 7);
  CHECK(std::equal(a.y.begin(), a.y.end(), longer.y.begin()));
}

TEST_CASE("deterministic outcome scenario") {
  Scenario s;
  s.confounder_names = {"z"};
  s.strata = {{1}};
  s.p_z = {1.0};
  s.p_x_given_z = {0.5};
  s.p_y_given_xz = {{1.0, 1.0}};
  const auto d = Simulate(s, 500, 3);
  CHECK(std::all_of(d.y.begin(), d.y.end(), [](auto v) { return v == 1; }));
  CHECK(std::count(d.x.begin(), d.x.end(), 1) > 0);
  CHECK(std::count(d.x.begin(), d.x.end(), 0) > 0);
}

TEST_CASE("treated fraction concentrates at 1e6 draws") {
  Scenario s = TwoStrata();
  s.p_x_given_z = {0.5, 0.5};
  const auto d = Simulate(s, 1000000, 11);
  std::size_t treated = 0;
  for (const auto x : d.x) treated += x;
  CHECK(std::abs(static_cast<double>(treated) / 1e6 - 0.5) < 0.002);
}

TEST_CASE("cell frequencies converge to the generating products") {
  Scenario s;
  s.confounder_names = {"a", "b"};
  s.strata = {{0, 0}, {0, 1}, {1, 1}};
  s.p_z = {0.2, 0.3, 0.5};
  s.p_x_given_z = {0.1, 0.5, 0.8};
  s.p_y_given_xz = {{0.3, 0.6}, {0.5, 0.5}, {0.05, 0.9}};
  const std::size_t n = 1000000;
  const auto d = Simulate(s, n, 2024);
  std::map<std::array<std::size_t, 3>, double> freq;
  for (std::size_t i = 0; i < n; ++i) freq[{d.stratum[i], d.x[i], d.y[i]}] += 1.0 / n;
  double worst = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    for (int x = 0; x < 2; ++x) {
      for (int y = 0; y < 2; ++y) {
        const double px = x ? s.p_x_given_z[k] : 1 - s.p_x_given_z[k];
        const double py = y ? s.p_y_given_xz[k][x] : 1 - s.p_y_given_xz[k][x];
        worst = std::max(worst, std::abs(freq[{k, std::size_t(x), std::size_t(y)}] -
                                         s.p_z[k] * px * py));
      }
    }
  }
  CHECK(worst < 0.005);
}

TEST_CASE("randomized transform keeps the truth") {
  const Scenario s = TwoStrata();
  const Scenario r = Randomized(s);
  CHECK(TrueAte(r) == doctest::Approx(TrueAte(s)).epsilon(1e-15));
  CHECK(r.p_x_given_z[0] == r.p_x_given_z[1]);
  CHECK(r.p_x_given_z[0] == doctest::Approx(0.45));
}

TEST_CASE("scenario file round trip is exact") {
  Scenario s = BuildScenario(RandomTable(5, 300, 3));
  s.name = "rt";
  const auto path = std::filesystem::temp_directory_path() / "atebench_rt.scenario.json";
  SaveScenario(s, path);
  const Scenario back = LoadScenario(path);
  CHECK(back.name == "rt");
  CHECK(back.strata == s.strata);
  CHECK(back.p_z == s.p_z);
  CHECK(back.p_x_given_z == s.p_x_given_z);
  CHECK(back.p_y_given_xz == s.p_y_given_xz);
  CHECK(back.confounder_names == s.confounder_names);
  CHECK(TrueAte(back) == TrueAte(s));
  json j = ScenarioToJson(s);
  CHECK(j.at("schema") == kScenarioSchema);
  j["schema"] = "other/9";
  CHECK_THROWS_AS(ScenarioFromJson(j), ScenarioError);
  std::filesystem::remove(path);
}

TEST_CASE("dataset csv round trip and subsetting") {
  const Scenario s = TwoStrata();
  const auto d = Simulate(s, 50, 1);
  const auto path = std::filesystem::temp_directory_path() / "atebench_rt_data.csv";
  WriteDatasetCsv(d, path);
  const auto back = ReadDatasetCsv(path);
  CHECK(back.x == d.x);
  CHECK(back.y == d.y);
  CHECK(back.z == d.z);
  CHECK(back.confounder_names == d.confounder_names);
  CHECK(DatasetHash(back) == DatasetHash(d));
  std::filesystem::remove(path);

  const std::vector<std::uint32_t> idx{3, 3, 0};
  const auto sub = d.Subset(idx);
  REQUIRE(sub.size() == 3);
  CHECK(sub.x[0] == d.x[3]);
  CHECK(sub.x[1] == d.x[3]);
  CHECK(sub.y[2] == d.y[0]);
  CHECK(sub.stratum[2] == d.stratum[0]);
}

TEST_CASE("shipped configs build valid scenarios") {
  const std::filesystem::path root = ATEBENCH_SOURCE_DIR;
  const Scenario indo =
      BuildScenario(Ingest(LoadIngestionConfig(root / "configs/indomethacin.json")));
  CHECK_NOTHROW(indo.Validate());
  CHECK(indo.name == "indomethacin");
  CHECK(indo.num_confounders() == 4);
  CHECK(TrueAte(indo) < 0);

  const Scenario rot =
      BuildScenario(Ingest(LoadIngestionConfig(root / "configs/rotterdam.json")));
  CHECK_NOTHROW(rot.Validate());
  CHECK(rot.num_confounders() == 8);
  CHECK(TrueAte(rot) < 0);
  for (const double p : rot.p_x_given_z) CHECK((p > 0 && p < 1));
}
