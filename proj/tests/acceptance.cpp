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
// Acceptance runner: one PASS/FAIL line per headline criterion, details
// indented below it. Optional arguments select a subset by key.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "property_checks.hpp"
#include "qtomo/bench.hpp"
#include "qtomo/error.hpp"
#include "qtomo/metrics.hpp"
#include "qtomo/region.hpp"
#include "qtomo/sampling.hpp"

using namespace qtomo;

namespace {

constexpr std::uint64_t kSeed = 20260101;

struct Line {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    notes.push_back(std::string(ok ? "ok   " : "MISS ") + what);
  }
  void note(const std::string& what) { notes.push_back("     " + what); }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

ScenarioConfig scenario_config(const std::string& sampler, int unmeasured) {
  ScenarioConfig c;
  c.seed = kSeed;
  c.trials = 10'000;
  c.sampler = parse_sampler(sampler);
  c.unmeasured_count = unmeasured;
  c.distances = {DistanceKind::Hs, DistanceKind::Fidelity, DistanceKind::RelativeEntropy};
  c.validate();
  return c;
}

const EstimatorKind kCompetitors[] = {EstimatorKind::Mvne, EstimatorKind::MseMub, EstimatorKind::Com,
                                      EstimatorKind::Random};

// Checks the four-estimator means against targets and the expected ordering.
void check_comparison(Line& line, const SummaryTable& s, const double (&hs)[4], double tol,
                      const double* fid, bool has_random_basis) {
  line.note(fmt("trials %.0f, failure rate %.4f, %.0f s", s.trials, s.failure_rate, s.wall_time_seconds));
  double mean[4];
  for (int k = 0; k < 4; ++k) {
    const DistanceStats& d = s.at(kCompetitors[k]).at(DistanceKind::Hs);
    mean[k] = d.mean;
    line.require(std::abs(d.mean - hs[k]) <= tol,
                 to_string(kCompetitors[k]) + fmt(" HS mean %.4f +- %.4f (target %.3f +- %.2f)", d.mean,
                                                  d.std_error, hs[k], tol));
  }
  if (fid) {
    for (int k = 0; k < 4; ++k) {
      const DistanceStats& d = s.at(kCompetitors[k]).at(DistanceKind::Fidelity);
      line.require(std::abs(d.mean - fid[k]) <= tol,
                   to_string(kCompetitors[k]) + fmt(" fidelity mean %.4f +- %.4f (target %.3f +- %.2f)",
                                                    d.mean, d.std_error, fid[k], tol));
    }
  }
  // mean order: mvne, mse_mub, com, random
  line.require(mean[1] <= mean[0] && mean[0] < mean[2] && mean[2] < mean[3],
               fmt("ordering mse_mub <= mvne < com < random (%.4f, %.4f, %.4f, %.4f)", mean[1], mean[0],
                   mean[2], mean[3]));
  if (has_random_basis) {
    const double r = s.at(EstimatorKind::MseRandomBasis).at(DistanceKind::Hs).mean;
    line.require(r > mean[3], fmt("mse_random_basis last (%.4f vs random %.4f)", r, mean[3]));
  }
}

Line compare_hs1() {
  Line line;
  const BenchResult r = run_benchmark(scenario_config("hs", 1));
  const double hs[4] = {0.160, 0.155, 0.179, 0.210};
  const double fid[4] = {0.811, 0.812, 0.802, 0.780};
  check_comparison(line, r.summary, hs, 0.02, fid, true);
  return line;
}

Line compare_eig1() {
  Line line;
  const BenchResult r = run_benchmark(scenario_config("eig", 1));
  const double hs[4] = {0.124, 0.118, 0.134, 0.238};
  check_comparison(line, r.summary, hs, 0.02, nullptr, true);
  return line;
}

Line compare_two() {
  Line line;
  const double hs_hs[4] = {0.273, 0.268, 0.283, 0.372};
  const double eig_hs[4] = {0.198, 0.196, 0.203, 0.356};
  line.note("HS sampling, two bases unmeasured");
  check_comparison(line, run_benchmark(scenario_config("hs", 2)).summary, hs_hs, 0.03, nullptr, false);
  line.note("eigenvalue-simplex sampling, two bases unmeasured");
  check_comparison(line, run_benchmark(scenario_config("eig", 2)).summary, eig_hs, 0.03, nullptr, false);
  return line;
}

Line area_measure() {
  Line line;
  const PriorData whole = PriorData::from_state(DensityMatrix::pure(Vector3c(1, 0, 0)), {0});
  const AreaResult a = region_area(whole, 100'000, Rng(kSeed));
  line.require(std::abs(a.area - std::numbers::pi / 2) <= 3.0 * a.std_error + 1e-12,
               fmt("full simplex: area %.6f +- %.2g vs pi/2", a.area, a.std_error));

  Rng rng = Rng(kSeed).split(1);
  int agree = 0;
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const DensityMatrix rho = sample_hs(rng);
    const PriorData prior = PriorData::from_state(rho, {0});
    const AreaResult mc = region_area(prior, 100'000, rng.split(static_cast<std::uint64_t>(i)));
    const oracle::Slice slice{oracle::probs_of(rho.matrix()), 0};
    const double grid = oracle::octant_area(
        [&](const Eigen::Vector3d& p) { return oracle::min_eig(slice.rho(p)) >= 0.0; }, 1000);
    const double z = std::abs(mc.area - grid) / mc.std_error;
    worst = std::max(worst, z);
    agree += z <= 3.0;
  }
  line.require(agree == 20, fmt("20 random priors vs 10^6-node quadrature: %.0f within 3 sigma, max z %.2f",
                                agree, worst));
  return line;
}

Line mub_search() {
  Line line;
  Rng rng = Rng(kSeed).split(2);
  int wins = 0;
  for (int i = 0; i < 100; ++i) {
    const PriorData prior = PriorData::from_state(sample_hs(rng), {0});
    const MeasurementSearch s = search_best_measurement(prior, 50, rng.split(static_cast<std::uint64_t>(i)));
    wins += s.winner == 0;
  }
  line.require(wins >= 95, fmt("canonical basis wins %.0f of 100 priors against 50 Haar candidates", wins));
  return line;
}

Line rank2_signature() {
  Line line;
  ScenarioConfig c;
  c.seed = kSeed;
  c.trials = 20'000;
  c.sampler = parse_sampler("rank2");
  c.estimators = {EstimatorKind::Mvne, EstimatorKind::MseMub, EstimatorKind::Com, EstimatorKind::Random};
  c.distances = {DistanceKind::Hs};
  const RatioAnalysis r = ratio_analysis(c, 40, 2.0);
  for (const auto& [kind, h] : r.histograms) {
    line.note(to_string(kind) + fmt(" ratio mode %.3f", h.mode_center()));
  }
  for (const auto& [kind, h] : r.histograms) {
    if (kind != EstimatorKind::Com) continue;
    const double mode = h.mode_center();
    line.require(mode >= 0.35 && mode <= 0.50,
                 fmt("COM ratio mode %.3f in [0.35, 0.50] (%.0f trials, failure rate %.3f)", mode,
                     static_cast<double>(c.trials), r.bench.summary.failure_rate));
  }

  auto failure_rate = [&](const std::string& sampler) {
    ScenarioConfig f = c;
    f.trials = 5'000;
    f.sampler = parse_sampler(sampler);
    f.distances = {DistanceKind::Hs, DistanceKind::RatioSqrtArea};
    return run_benchmark(f).summary.failure_rate;
  };
  const double pure = failure_rate("pure");
  const double mixed = failure_rate("mixed");
  line.require(pure >= 3.0 * mixed && pure > 0.0,
               fmt("failure rate pure %.4f vs highly mixed %.4f (needs factor 3)", pure, mixed));
  return line;
}

Line property_suite() {
  Line line;
  const std::pair<std::string, std::function<checks::Result()>> items[] = {
      {"frame round trip", [] { return checks::frame_roundtrip(1000, kSeed); }},
      {"gradients", [] { return checks::gradients(100, kSeed); }},
      {"mvne multi-start", [] { return checks::mvne_multistart(10, 10, kSeed); }},
      {"mvne span", [] { return checks::mvne_span(50, kSeed); }},
      {"mse kkt", [] { return checks::mse_kkt(50, kSeed); }},
      {"com affine invariance", [] { return checks::com_affine(5, kSeed); }},
      {"mub unbiased", [] { return checks::mub_unbiased(); }},
      {"unitary moments", [] { return checks::unitary_moments(100'000, kSeed); }},
      {"sampler means", [] { return checks::sampler_means(100'000, kSeed); }},
      {"determinism", [] { return checks::determinism(kSeed); }},
  };
  for (const auto& [name, run] : items) {
    const checks::Result r = run();
    line.require(r.pass, name + ": " + r.detail);
  }
  return line;
}

}  // namespace

int main(int argc, char** argv) {
  const std::pair<std::string, std::pair<std::string, std::function<Line()>>> criteria[] = {
      {"hs1", {"Estimator comparison: HS sampling, one basis unmeasured", compare_hs1}},
      {"eig1", {"Estimator comparison: eigenvalue-simplex sampling, one basis unmeasured", compare_eig1}},
      {"two", {"Estimator comparison: two bases unmeasured", compare_two}},
      {"area", {"Area measure", area_measure}},
      {"search", {"Canonical basis maximises region area", mub_search}},
      {"rank2", {"Rank-2 ratio signature and failure gap", rank2_signature}},
      {"properties", {"Property suite", property_suite}},
  };
  std::set<std::string> wanted(argv + 1, argv + argc);
  for (const auto& w : wanted) {
    if (std::none_of(std::begin(criteria), std::end(criteria), [&](const auto& c) { return c.first == w; })) {
      std::fprintf(stderr, "unknown criterion '%s'\n", w.c_str());
      return 2;
    }
  }
  bool all = true;
  for (const auto& [key, item] : criteria) {
    if (!wanted.empty() && !wanted.count(key)) continue;
    const auto start = std::chrono::steady_clock::now();
    Line line;
    try {
      line = item.second();
    } catch (const std::exception& e) {
      line.require(false, std::string("threw: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s [%s, %.0f s]\n", line.pass ? "PASS" : "FAIL", item.first.c_str(), key.c_str(), secs);
    for (const auto& n : line.notes) std::printf("    %s\n", n.c_str());
    std::fflush(stdout);
    all = all && line.pass;
  }
  return all ? 0 : 1;
}
