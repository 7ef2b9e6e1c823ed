// Copyright 2026 The qtomo Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "qtomo/bench.hpp"
#include "qtomo/error.hpp"
#include "qtomo/io.hpp"
#include "testutil.hpp"

using namespace qtomo;

namespace {

ScenarioConfig fixed_config(const DensityMatrix& rho) {
  ScenarioConfig c;
  c.sampler.kind = SamplerKind::Fixed;
  c.sampler.fixed = rho;
  c.trials = 1;
  c.threads = 1;
  c.com_samples = 2000;
  c.area_samples = 2000;
  return c;
}

ScenarioConfig small_config(std::uint64_t seed, std::size_t trials) {
  ScenarioConfig c;
  c.seed = seed;
  c.trials = trials;
  c.com_samples = 2000;
  c.area_samples = 2000;
  c.threads = 2;
  return c;
}

std::string csv_of(const ScenarioConfig& c, const std::vector<TrialRecord>& r) {
  std::ostringstream out;
  write_trials_csv(out, c, r);
  return out.str();
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("qtomo_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("run_trial on a pure computational state") {
  ScenarioConfig c = fixed_config(testutil::basis_state(0));
  c.estimators = {EstimatorKind::Mvne};
  c.validate();
  const TrialRecord r = run_trial(c, 0);
  REQUIRE(r.status == TrialStatus::Ok);
  CHECK(r.outcomes.size() == 1);
  CHECK(r.outcomes[0].distance.hs == doctest::Approx(std::sqrt(2.0 / 3.0)));
  CHECK(r.outcomes[0].distance.fidelity == doctest::Approx(1.0 / std::sqrt(3.0)));
  CHECK(r.true_purity == doctest::Approx(1.0));
}

TEST_CASE("run_trial on the maximally mixed state") {
  ScenarioConfig c = fixed_config(testutil::mixed());
  c.estimators = {EstimatorKind::Mvne, EstimatorKind::MseMub, EstimatorKind::MseRandomBasis,
                  EstimatorKind::Com, EstimatorKind::EnsembleMse, EstimatorKind::Random};
  c.distances = {DistanceKind::Hs, DistanceKind::Fidelity, DistanceKind::RelativeEntropy,
                 DistanceKind::RatioSqrtArea};
  c.validate();
  const TrialRecord r = run_trial(c, 3);
  REQUIRE(r.status == TrialStatus::Ok);
  for (const auto& o : r.outcomes) {
    if (o.kind == EstimatorKind::Random) continue;
    if (o.kind == EstimatorKind::Com) {
      // Monte Carlo centroid of the whole simplex.
      CHECK(o.distance.hs <= 0.02);
      continue;
    }
    CHECK(o.distance.hs <= 1e-6);
    CHECK(o.distance.fidelity == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(std::abs(o.distance.relative_entropy) <= 1e-6);
    CHECK(o.angular <= 1e-6);
  }
  CHECK(r.region_area.has_value());
}

TEST_CASE("run_trial is deterministic") {
  ScenarioConfig c = small_config(7, 1);
  c.distances.push_back(DistanceKind::RatioSqrtArea);
  c.validate();
  for (std::size_t id : {0u, 5u, 123u}) {
    const TrialRecord a = run_trial(c, id), b = run_trial(c, id);
    CHECK(csv_of(c, {a}) == csv_of(c, {b}));
    REQUIRE(a.outcomes.size() == b.outcomes.size());
    for (std::size_t k = 0; k < a.outcomes.size(); ++k) CHECK(a.outcomes[k].point == b.outcomes[k].point);
  }
}

TEST_CASE("a failed estimator blanks the whole trial") {
  ScenarioConfig c = small_config(11, 40);
  c.sampler = parse_sampler("pure");
  c.estimators = {EstimatorKind::Mvne, EstimatorKind::MseMub, EstimatorKind::Random};
  const BenchResult r = run_benchmark(c);
  std::size_t failed = 0;
  for (const auto& rec : r.records) {
    if (rec.status != TrialStatus::AllNaN) continue;
    ++failed;
    CHECK_FALSE(rec.failure.empty());
    for (const auto& o : rec.outcomes) {
      CHECK(std::isnan(o.distance.hs));
      CHECK(std::isnan(o.distance.fidelity));
      CHECK(std::isnan(o.angular));
      CHECK(o.status == "AllNaN");
    }
  }
  CHECK(failed > 0);
  CHECK(r.summary.failed == failed);
  CHECK(r.summary.failure_rate == doctest::Approx(failed / 40.0));
  for (const auto& row : r.summary.rows) CHECK(row.at(DistanceKind::Hs).n == 40 - failed);
}

TEST_CASE("a single trial summarises to itself") {
  ScenarioConfig c = small_config(13, 1);
  const BenchResult r = run_benchmark(c);
  REQUIRE(r.records.size() == 1);
  REQUIRE(r.records[0].status == TrialStatus::Ok);
  for (std::size_t k = 0; k < c.estimators.size(); ++k) {
    const auto& row = r.summary.at(c.estimators[k]);
    CHECK(row.at(DistanceKind::Hs).mean == r.records[0].outcomes[k].distance.hs);
    CHECK(row.at(DistanceKind::Fidelity).mean == r.records[0].outcomes[k].distance.fidelity);
    CHECK(row.at(DistanceKind::Hs).n == 1);
  }
}

TEST_CASE("trial CSV and summary JSON agree") {
  const auto dir = scratch_dir("summary");
  ScenarioConfig c = small_config(17, 25);
  c.distances.push_back(DistanceKind::RatioSqrtArea);
  c.out_dir = dir.string();
  const BenchResult r = run_benchmark(c);

  std::ifstream csv(dir / "trials.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == kTrialCsvHeader);
  const auto header = split(line);
  std::map<std::string, std::pair<double, int>> hs_sum, ratio_sum;
  int rows = 0;
  while (std::getline(csv, line)) {
    const auto cells = split(line);
    REQUIRE(cells.size() == header.size());
    ++rows;
    if (cells[5] == "AllNaN") continue;
    hs_sum[cells[4]].first += std::stod(cells[6]);
    hs_sum[cells[4]].second += 1;
    ratio_sum[cells[4]].first += std::stod(cells[10]);
    ratio_sum[cells[4]].second += 1;
  }
  CHECK(rows == 25 * static_cast<int>(c.estimators.size()));

  const Json summary = read_json_file((dir / "summary.json").string());
  CHECK(summary.at("trials") == 25);
  CHECK(summary.at("failure_rate").get<double>() == doctest::Approx(r.summary.failure_rate));
  CHECK(summary.contains("wall_time_seconds"));
  for (const auto& [name, acc] : hs_sum) {
    const Json& s = summary.at("estimators").at(name);
    CHECK(s.at("hs").at("mean").get<double>() == doctest::Approx(acc.first / acc.second).epsilon(1e-10));
    CHECK(s.at("hs").at("n").get<int>() == acc.second);
    CHECK(s.at("ratio_sqrt_area").at("mean").get<double>() ==
          doctest::Approx(ratio_sum[name].first / ratio_sum[name].second).epsilon(1e-10));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("benchmark output does not depend on thread count") {
  ScenarioConfig a = small_config(19, 16);
  a.threads = 1;
  ScenarioConfig b = a;
  b.threads = 4;
  CHECK(csv_of(a, run_benchmark(a).records) == csv_of(b, run_benchmark(b).records));
}

TEST_CASE("config validation") {
  ScenarioConfig c;
  c.unmeasured_count = 2;
  c.validate();
  CHECK(std::find(c.estimators.begin(), c.estimators.end(), EstimatorKind::MseRandomBasis) ==
        c.estimators.end());
  CHECK(c.estimators.size() == 4);

  ScenarioConfig z;
  z.trials = 0;
  CHECK_THROWS_AS(z.validate(), ConfigError);
  ScenarioConfig e;
  e.estimators.clear();
  CHECK_THROWS_AS(e.validate(), ConfigError);
  ScenarioConfig u;
  u.unmeasured_count = 3;
  CHECK_THROWS_AS(u.validate(), ConfigError);

  CHECK(benchmark_unmeasured(1) == std::vector<int>{0});
  CHECK(benchmark_unmeasured(2) == std::vector<int>{0, 1});
  for (const char* n : {"mvne", "mse_mub", "mse_random_basis", "com", "random", "ensemble_mse"})
    CHECK(to_string(parse_estimator(n)) == n);
  for (const char* n : {"hs", "fidelity", "relative_entropy", "ratio_sqrt_area"})
    CHECK(to_string(parse_distance(n)) == n);
  CHECK_THROWS_AS(parse_estimator("ml"), ConfigError);
  CHECK_THROWS_AS(parse_distance("trace"), ConfigError);
}

TEST_CASE("config file overrides field by field") {
  ScenarioConfig c;
  const Json j = Json::parse(R"({"seed": 5, "trials": 12, "sampler": "eig",
      "estimators": ["mvne", "com"], "optimizer": {"barrier_t": 1e-5},
      "sampling": {"fallback_acceptance": 0.01}})");
  apply_config(c, j);
  CHECK(c.seed == 5);
  CHECK(c.trials == 12);
  CHECK(c.sampler.kind == SamplerKind::EigSimplex);
  CHECK(c.estimators.size() == 2);
  CHECK(c.optimizer.barrier_t == 1e-5);
  CHECK(c.optimizer.armijo_alpha == 0.25);
  CHECK(c.sampling.fallback_acceptance == 0.01);
  CHECK(c.com_samples == kDefaultComSamples);

  CHECK_THROWS_AS(apply_config(c, Json::parse(R"({"seeds": 5})")), ConfigError);
  CHECK_THROWS_AS(apply_config(c, Json::parse(R"({"optimizer": {"t": 1}})")), ConfigError);
  CHECK_THROWS_AS(apply_config(c, Json::parse(R"({"trials": "many"})")), ConfigError);

  ScenarioConfig back;
  apply_config(back, config_to_json(c));
  CHECK(config_to_json(back) == config_to_json(c));
}

TEST_CASE("file errors") {
  CHECK_THROWS_AS(read_json_file("/nonexistent/qtomo.json"), IoError);
  const auto dir = scratch_dir("badjson");
  write_text_file((dir / "x.json").string(), "{not json");
  CHECK_THROWS_AS(read_json_file((dir / "x.json").string()), ConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("prior JSON round trip") {
  Rng rng(23);
  const PriorData prior = PriorData::from_state(sample_hs(rng), {0, 1});
  const PriorData back = prior_from_json(prior_to_json(prior));
  CHECK(back.unmeasured() == prior.unmeasured());
  const Eigen::VectorXd p = prior.center();
  CHECK(testutil::max_abs(back.rho(p) - prior.rho(p)) <= 1e-15);

  const Json bad = Json::parse(R"({"measured": [{"basis": 1, "probs": [0.5, 0.5, 0.1]},
      {"basis": 2, "probs": [0.3, 0.3, 0.4]}, {"basis": 3, "probs": [0.2, 0.2, 0.6]}],
      "unmeasured": [0]})");
  CHECK_THROWS_AS(prior_from_json(bad), Error);
}

TEST_CASE("estimate and area JSON") {
  const PriorData prior = PriorData::from_state(testutil::mixed(), {0});
  const Json e = estimate_to_json(mvne(prior));
  CHECK(e.at("method") == "mvne");
  CHECK(e.at("status") == "Converged");
  CHECK(e.at("point").size() == 3);
  // Rows of [re, im] pairs.
  REQUIRE(e.at("rho").size() == 3);
  CHECK(e.at("rho")[0].size() == 3);
  CHECK(e.at("rho")[0][0][0].get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(e.at("rho")[0][1][1].get<double>() == doctest::Approx(0.0));
  const Json a = area_to_json(region_area(prior, 1000, Rng(1)));
  for (const char* k : {"area", "std_error", "n", "acceptance"}) CHECK(a.contains(k));
}

TEST_CASE("fixed random basis") {
  const OrthonormalBasis a = fixed_random_basis(99), b = fixed_random_basis(99);
  CHECK(a.kets() == b.kets());
  CHECK(testutil::max_abs(a.kets() - fixed_random_basis(100).kets()) > 1e-3);
}

TEST_CASE("histograms") {
  const Histogram h = make_histogram({0.05, 0.15, 0.16, 0.17, 0.95, 3.0}, 0.0, 1.0, 10);
  CHECK(h.counts.size() == 10);
  CHECK(h.counts[1] == 3);
  CHECK(h.counts[9] == 1);
  CHECK(h.bin_width() == doctest::Approx(0.1));
  CHECK(h.mode_center() == doctest::Approx(0.15));
}

TEST_CASE("ratio analysis") {
  const auto dir = scratch_dir("ratio");
  ScenarioConfig c = small_config(29, 30);
  c.sampler = parse_sampler("rank2");
  c.estimators = {EstimatorKind::Mvne, EstimatorKind::Com};
  c.distances = {DistanceKind::Hs};
  c.out_dir = dir.string();
  const RatioAnalysis r = ratio_analysis(c, 20, 2.0);
  CHECK(r.bench.summary.at(EstimatorKind::Com).at(DistanceKind::RatioSqrtArea).n > 0);
  REQUIRE(r.histograms.size() == 2);
  std::size_t total = 0;
  for (auto n : r.histograms[1].second.counts) total += n;
  CHECK(total <= r.ratios[1].second.size());
  CHECK(std::filesystem::exists(dir / "ratio_hist.csv"));
  CHECK(std::filesystem::exists(dir / "trials.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("region plot data") {
  const PriorData zero = PriorData::from_state(testutil::basis_state(0), {0});
  std::ostringstream grid, boundary;
  emit_region_plot_data(zero, 12, grid, boundary, 32);
  std::istringstream in(grid.str());
  std::string line;
  std::getline(in, line);
  const auto header = split(line);
  const auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  REQUIRE(col("feasible") < header.size());
  int nodes = 0;
  while (std::getline(in, line)) {
    const auto cells = split(line);
    CHECK(cells[col("feasible")] == "1");
    const Eigen::Vector3d p(std::stod(cells[col("p1")]), std::stod(cells[col("p2")]), std::stod(cells[col("p3")]));
    CHECK(std::stod(cells[col("min_eig")]) == doctest::Approx(min_eig_field(p, zero)).epsilon(1e-9));
    ++nodes;
  }
  CHECK(nodes > 0);
  CHECK(boundary.str().rfind("angle,p1,p2,p3,min_eig\n", 0) == 0);
}
