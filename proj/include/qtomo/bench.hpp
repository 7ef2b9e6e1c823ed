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

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "qtomo/estimators.hpp"
#include "qtomo/metrics.hpp"
#include "qtomo/region.hpp"
#include "qtomo/sampling.hpp"

namespace qtomo {

enum class EstimatorKind { Mvne, MseMub, MseRandomBasis, Com, Random, EnsembleMse };
enum class DistanceKind { Hs, Fidelity, RelativeEntropy, RatioSqrtArea };

std::string to_string(EstimatorKind kind);
std::string to_string(DistanceKind kind);
EstimatorKind parse_estimator(const std::string& name);
DistanceKind parse_distance(const std::string& name);

struct ScenarioConfig {
  std::uint64_t seed = 20260101;
  std::size_t trials = 10'000;
  SamplerSpec sampler;
  int unmeasured_count = 1;
  std::vector<EstimatorKind> estimators{EstimatorKind::Mvne, EstimatorKind::MseMub,
                                        EstimatorKind::MseRandomBasis, EstimatorKind::Com,
                                        EstimatorKind::Random};
  std::vector<DistanceKind> distances{DistanceKind::Hs, DistanceKind::Fidelity,
                                      DistanceKind::RelativeEntropy};
  std::size_t com_samples = kDefaultComSamples;
  std::size_t area_samples = 10'000;
  int ensemble_bases = 20;
  OptimizerOptions optimizer;
  // Both region samplers are exactly uniform; the envelope is far cheaper
  // once rejection from the simplex accepts fewer than 5% of proposals.
  SamplingOptions sampling{.fallback_acceptance = 0.05};
  std::string out_dir;  // empty: nothing written
  int threads = 0;      // 0: one per hardware thread

  // Throws ConfigError. Drops mse_random_basis when two bases are unmeasured.
  void validate();
  bool wants(DistanceKind d) const;
};

// Unmeasured slots used by the benchmark: {0} or {0, 1}.
std::vector<int> benchmark_unmeasured(int count);

// The committed non-optimal future basis, fixed per run by the seed.
OrthonormalBasis fixed_random_basis(std::uint64_t seed);

enum class TrialStatus { Ok, AllNaN };

struct EstimatorOutcome {
  EstimatorKind kind = EstimatorKind::Mvne;
  std::string status;      // estimator status, or the error that stopped it
  DistanceReport distance;
  double angular = 0.0;    // between true and estimated unmeasured probabilities
  double ratio = 0.0;      // angular / sqrt(area)
  Eigen::VectorXd point;
};

struct TrialRecord {
  std::size_t trial_id = 0;
  double true_purity = 0.0;
  std::optional<double> region_area;
  std::vector<EstimatorOutcome> outcomes;  // config order
  TrialStatus status = TrialStatus::Ok;
  std::string failure;                     // first failing estimator and why
};

TrialRecord run_trial(const ScenarioConfig& config, std::size_t trial_id);

struct DistanceStats {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

struct EstimatorSummary {
  EstimatorKind kind = EstimatorKind::Mvne;
  std::vector<std::pair<DistanceKind, DistanceStats>> stats;
  const DistanceStats& at(DistanceKind d) const;
};

struct SummaryTable {
  std::vector<EstimatorSummary> rows;
  std::size_t trials = 0;
  std::size_t failed = 0;
  double failure_rate = 0.0;
  double wall_time_seconds = 0.0;

  const EstimatorSummary& at(EstimatorKind kind) const;
};

// Deterministic fold in trial_id order; AllNaN trials count only as failures.
SummaryTable summarize(const ScenarioConfig& config, const std::vector<TrialRecord>& records);

struct BenchResult {
  std::vector<TrialRecord> records;
  SummaryTable summary;
};

// All trials (parallel over trial ids); writes trials.csv and summary.json
// into out_dir when it is set.
BenchResult run_benchmark(ScenarioConfig config);

inline constexpr const char* kTrialCsvHeader =
    "trial_id,sampler,true_purity,region_area,estimator,status,d_hs,fidelity,d_relent,d_angular,ratio";

void write_trials_csv(std::ostream& out, const ScenarioConfig& config,
                      const std::vector<TrialRecord>& records);

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::size_t> counts;

  double bin_width() const;
  double mode_center() const;
};

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins);

struct RatioAnalysis {
  BenchResult bench;
  std::vector<std::pair<EstimatorKind, std::vector<double>>> ratios;  // valid trials only
  std::vector<std::pair<EstimatorKind, Histogram>> histograms;
};

// Benchmark with ratio_sqrt_area forced on, plus ratio histograms
// (`bins` bins on [0, hi]); writes ratio_hist.csv into out_dir when set.
RatioAnalysis ratio_analysis(ScenarioConfig config, int bins = 40, double hi = 2.0);

// Barycentric grid (grid_n points per edge) of lambda_min, det and
// feasibility, plus the traced boundary from the deepest interior point.
void emit_region_plot_data(const PriorData& prior, int grid_n, std::ostream& grid,
                           std::ostream& boundary, int n_angles = kDefaultBoundaryAngles);

}  // namespace qtomo
