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

#include "qtomo/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "qtomo/error.hpp"
#include "qtomo/io.hpp"

namespace qtomo {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Stream indices below the per-estimator range.
constexpr std::uint64_t kStateStream = 0;
constexpr std::uint64_t kAreaStream = 1;
constexpr std::uint64_t kEstimatorStreamBase = 16;

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

bool failed(EstimateStatus s) {
  return s == EstimateStatus::Failed || s == EstimateStatus::FallbackMaxMinEig;
}

Estimate run_estimator(EstimatorKind kind, const ScenarioConfig& config, const PriorData& prior,
                       const OrthonormalBasis& random_basis, const Rng& rng) {
  switch (kind) {
    case EstimatorKind::Mvne:
      return mvne(prior, config.optimizer);
    case EstimatorKind::MseMub:
      return mse(prior, config.optimizer);
    case EstimatorKind::MseRandomBasis: {
      const OrthonormalBasis future[1] = {random_basis};
      return mse(prior, future, config.optimizer);
    }
    case EstimatorKind::Com:
      return com(prior, config.com_samples, rng, config.sampling);
    case EstimatorKind::Random:
      return random_estimator(prior, rng, config.sampling);
    case EstimatorKind::EnsembleMse:
      return ensemble_mse(prior, config.ensemble_bases, rng, config.optimizer).estimate;
  }
  throw ConfigError("unknown estimator");
}

double distance_value(const EstimatorOutcome& o, DistanceKind d) {
  switch (d) {
    case DistanceKind::Hs:
      return o.distance.hs;
    case DistanceKind::Fidelity:
      return o.distance.fidelity;
    case DistanceKind::RelativeEntropy:
      return o.distance.relative_entropy;
    case DistanceKind::RatioSqrtArea:
      return o.ratio;
  }
  return kNaN;
}

}  // namespace

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::Mvne:
      return "mvne";
    case EstimatorKind::MseMub:
      return "mse_mub";
    case EstimatorKind::MseRandomBasis:
      return "mse_random_basis";
    case EstimatorKind::Com:
      return "com";
    case EstimatorKind::Random:
      return "random";
    case EstimatorKind::EnsembleMse:
      return "ensemble_mse";
  }
  return "unknown";
}

std::string to_string(DistanceKind kind) {
  switch (kind) {
    case DistanceKind::Hs:
      return "hs";
    case DistanceKind::Fidelity:
      return "fidelity";
    case DistanceKind::RelativeEntropy:
      return "relative_entropy";
    case DistanceKind::RatioSqrtArea:
      return "ratio_sqrt_area";
  }
  return "unknown";
}

EstimatorKind parse_estimator(const std::string& name) {
  for (auto k : {EstimatorKind::Mvne, EstimatorKind::MseMub, EstimatorKind::MseRandomBasis,
                 EstimatorKind::Com, EstimatorKind::Random, EstimatorKind::EnsembleMse}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown estimator '" + name + "'");
}

DistanceKind parse_distance(const std::string& name) {
  for (auto k : {DistanceKind::Hs, DistanceKind::Fidelity, DistanceKind::RelativeEntropy,
                 DistanceKind::RatioSqrtArea}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown distance '" + name + "'");
}

void ScenarioConfig::validate() {
  if (trials < 1) throw ConfigError("trials must be at least 1");
  if (unmeasured_count != 1 && unmeasured_count != 2) {
    throw ConfigError("unmeasured count must be 1 or 2");
  }
  if (unmeasured_count == 2) {
    std::erase(estimators, EstimatorKind::MseRandomBasis);
  }
  if (estimators.empty()) throw ConfigError("estimator set is empty");
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (estimators[i] == estimators[j]) throw ConfigError("duplicate estimator");
    }
  }
  if (com_samples < 1000) throw ConfigError("com_samples must be at least 1000");
  if (area_samples < 1000) throw ConfigError("area_samples must be at least 1000");
  if (ensemble_bases < 10) throw ConfigError("ensemble_bases must be at least 10");
  for (double a : sampler.dirichlet_alpha) {
    if (!(a > 0.0)) throw ConfigError("dirichlet alpha entries must be positive");
  }
  if (sampler.purity_band && sampler.purity_band->first > sampler.purity_band->second) {
    throw ConfigError("purity band is empty");
  }
  if (threads < 0) throw ConfigError("threads must be non-negative");
  optimizer.validate();
}

bool ScenarioConfig::wants(DistanceKind d) const {
  return std::find(distances.begin(), distances.end(), d) != distances.end();
}

std::vector<int> benchmark_unmeasured(int count) {
  if (count == 1) return {0};
  if (count == 2) return {0, 1};
  throw ConfigError("unmeasured count must be 1 or 2");
}

OrthonormalBasis fixed_random_basis(std::uint64_t seed) {
  Rng rng = Rng(seed).split(0xf1c5ed0ba515ULL);
  return OrthonormalBasis(haar_unitary(rng));
}

TrialRecord run_trial(const ScenarioConfig& config, std::size_t trial_id) {
  const Rng trial = Rng(config.seed).split(trial_id);
  Rng state_rng = trial.split(kStateStream);
  const DensityMatrix truth = sample_state(config.sampler, state_rng);

  TrialRecord rec;
  rec.trial_id = trial_id;
  rec.true_purity = purity(truth);

  const PriorData prior = PriorData::from_state(truth, benchmark_unmeasured(config.unmeasured_count));
  const Eigen::VectorXd true_point = prior.coordinates_of(truth.matrix());
  const OrthonormalBasis random_basis = fixed_random_basis(config.seed);

  if (config.wants(DistanceKind::RatioSqrtArea)) {
    const AreaResult area = region_area(prior, config.area_samples, trial.split(kAreaStream));
    rec.region_area = area.area;
    if (area.no_hits) rec.failure = "region_area: no accepted draws";
  }

  for (EstimatorKind kind : config.estimators) {
    EstimatorOutcome o;
    o.kind = kind;
    if (rec.failure.empty()) {
      const Rng rng = trial.split(kEstimatorStreamBase + static_cast<std::uint64_t>(kind));
      try {
        const Estimate e = run_estimator(kind, config, prior, random_basis, rng);
        o.status = to_string(e.status);
        o.point = e.point;
        if (failed(e.status)) {
          rec.failure = to_string(kind) + ": " + o.status;
        } else {
          o.distance = compare(truth, e.rho);
          o.angular = angular_distance(true_point, e.point);
          o.ratio = rec.region_area ? o.angular / std::sqrt(*rec.region_area) : kNaN;
        }
      } catch (const Error& err) {
        rec.failure = to_string(kind) + ": " + err.what();
      }
    }
    rec.outcomes.push_back(std::move(o));
  }

  if (!rec.failure.empty()) {
    rec.status = TrialStatus::AllNaN;
    for (auto& o : rec.outcomes) {
      o.status = "AllNaN";
      o.distance = {kNaN, kNaN, kNaN, kNaN, false};
      o.angular = kNaN;
      o.ratio = kNaN;
      o.point.resize(0);
    }
  }
  return rec;
}

const DistanceStats& EstimatorSummary::at(DistanceKind d) const {
  for (const auto& [kind, s] : stats) {
    if (kind == d) return s;
  }
  throw Error("summary has no distance " + to_string(d));
}

const EstimatorSummary& SummaryTable::at(EstimatorKind kind) const {
  for (const auto& row : rows) {
    if (row.kind == kind) return row;
  }
  throw Error("summary has no estimator " + to_string(kind));
}

SummaryTable summarize(const ScenarioConfig& config, const std::vector<TrialRecord>& records) {
  SummaryTable table;
  table.trials = records.size();
  for (const auto& r : records) {
    if (r.status == TrialStatus::AllNaN) ++table.failed;
  }
  table.failure_rate =
      records.empty() ? 0.0 : static_cast<double>(table.failed) / static_cast<double>(records.size());
  for (std::size_t k = 0; k < config.estimators.size(); ++k) {
    EstimatorSummary row;
    row.kind = config.estimators[k];
    for (DistanceKind d : config.distances) {
      double sum = 0.0;
      double sum_sq = 0.0;
      std::size_t n = 0;
      for (const auto& r : records) {
        if (r.status == TrialStatus::AllNaN) continue;
        const double v = distance_value(r.outcomes[k], d);
        sum += v;
        sum_sq += v * v;
        ++n;
      }
      DistanceStats s;
      s.n = n;
      if (n > 0) {
        s.mean = sum / static_cast<double>(n);
        if (n > 1) {
          const double var = std::max(0.0, (sum_sq - sum * s.mean) / static_cast<double>(n - 1));
          s.std_error = std::sqrt(var / static_cast<double>(n));
        }
      } else {
        s.mean = kNaN;
        s.std_error = kNaN;
      }
      row.stats.emplace_back(d, s);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

BenchResult run_benchmark(ScenarioConfig config) {
  config.validate();
  const auto t0 = std::chrono::steady_clock::now();
  BenchResult result;
  result.records.resize(config.trials);

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, config.trials));
  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next++; i < config.trials; i = next++) {
      result.records[i] = run_trial(config, i);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  result.summary = summarize(config, result.records);
  result.summary.wall_time_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  if (!config.out_dir.empty()) {
    ensure_directory(config.out_dir);
    std::ostringstream csv;
    write_trials_csv(csv, config, result.records);
    write_text_file(config.out_dir + "/trials.csv", csv.str());
    write_text_file(config.out_dir + "/summary.json",
                    summary_to_json(config, result.summary).dump(2) + "\n");
  }
  return result;
}

void write_trials_csv(std::ostream& out, const ScenarioConfig& config,
                      const std::vector<TrialRecord>& records) {
  const std::string sampler = sampler_tag(config.sampler);
  out << kTrialCsvHeader << '\n';
  for (const auto& r : records) {
    const std::string area = r.region_area ? fmt(*r.region_area) : "";
    for (const auto& o : r.outcomes) {
      out << r.trial_id << ',' << sampler << ',' << fmt(r.true_purity) << ',' << area << ','
          << to_string(o.kind) << ',' << o.status << ',' << fmt(o.distance.hs) << ','
          << fmt(o.distance.fidelity) << ',' << fmt(o.distance.relative_entropy) << ','
          << fmt(o.angular) << ',' << fmt(o.ratio) << '\n';
    }
  }
}

double Histogram::bin_width() const {
  return counts.empty() ? 0.0 : (hi - lo) / static_cast<double>(counts.size());
}

double Histogram::mode_center() const {
  if (counts.empty()) return kNaN;
  const auto it = std::max_element(counts.begin(), counts.end());
  const auto idx = static_cast<double>(it - counts.begin());
  return lo + (idx + 0.5) * bin_width();
}

Histogram make_histogram(const std::vector<double>& values, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw ConfigError("histogram needs bins >= 1 and hi > lo");
  Histogram h;
  h.lo = lo;
  h.hi = hi;
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    if (!std::isfinite(v) || v < lo || v > hi) continue;
    auto idx = static_cast<std::size_t>((v - lo) / h.bin_width());
    h.counts[std::min(idx, h.counts.size() - 1)] += 1;
  }
  return h;
}

RatioAnalysis ratio_analysis(ScenarioConfig config, int bins, double hi) {
  if (!config.wants(DistanceKind::RatioSqrtArea)) {
    config.distances.push_back(DistanceKind::RatioSqrtArea);
  }
  const std::string out_dir = config.out_dir;
  RatioAnalysis out;
  out.bench = run_benchmark(config);
  config.validate();
  for (std::size_t k = 0; k < config.estimators.size(); ++k) {
    std::vector<double> values;
    for (const auto& r : out.bench.records) {
      if (r.status == TrialStatus::Ok) values.push_back(r.outcomes[k].ratio);
    }
    out.histograms.emplace_back(config.estimators[k], make_histogram(values, 0.0, hi, bins));
    out.ratios.emplace_back(config.estimators[k], std::move(values));
  }
  if (!out_dir.empty()) {
    std::ostringstream csv;
    csv << "estimator,bin_lo,bin_hi,count\n";
    for (const auto& [kind, h] : out.histograms) {
      for (std::size_t b = 0; b < h.counts.size(); ++b) {
        csv << to_string(kind) << ',' << fmt(h.lo + b * h.bin_width()) << ','
            << fmt(h.lo + (b + 1) * h.bin_width()) << ',' << h.counts[b] << '\n';
      }
    }
    write_text_file(out_dir + "/ratio_hist.csv", csv.str());
  }
  return out;
}

void emit_region_plot_data(const PriorData& prior, int grid_n, std::ostream& grid,
                           std::ostream& boundary, int n_angles) {
  if (prior.num_unmeasured() != 1) throw Error("region plot data needs one unmeasured basis");
  if (grid_n < 2) throw ConfigError("grid_n must be at least 2");
  grid << "p1,p2,p3,min_eig,det,feasible\n";
  const double step = 1.0 / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; i + j < grid_n; ++j) {
      const int k = grid_n - 1 - i - j;
      const Eigen::Vector3d p(i * step, j * step, k * step);
      const Matrix3c rho = prior.rho(p);
      grid << fmt(p(0)) << ',' << fmt(p(1)) << ',' << fmt(p(2)) << ','
           << fmt(min_eig_field(p, prior)) << ',' << fmt(determinant(rho)) << ','
           << (membership(p, prior) ? 1 : 0) << '\n';
    }
  }
  boundary << "angle,p1,p2,p3,min_eig\n";
  MinEigAscent deepest;
  try {
    deepest = locate_interior(prior);
  } catch (const InfeasibleRegionSuspected&) {
    return;
  }
  const BoundaryMesh mesh = trace_boundary(prior, n_angles, prior.lift(deepest.u));
  for (std::size_t a = 0; a < mesh.points.size(); ++a) {
    const auto& p = mesh.points[a];
    boundary << fmt(mesh.angles[a]) << ',' << fmt(p(0)) << ',' << fmt(p(1)) << ',' << fmt(p(2))
             << ',' << fmt(mesh.min_eigs[a]) << '\n';
  }
}

}  // namespace qtomo
