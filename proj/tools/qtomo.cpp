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

// qtomo command line: benchmarks, ratio histograms and single-prior tools.

#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qtomo/bench.hpp"
#include "qtomo/error.hpp"
#include "qtomo/estimators.hpp"
#include "qtomo/io.hpp"
#include "qtomo/metrics.hpp"
#include "qtomo/region.hpp"
#include "qtomo/sampling.hpp"

namespace {

using namespace qtomo;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitTrialFailure = 3;

struct CommonFlags {
  std::uint64_t seed = ScenarioConfig{}.seed;
  std::size_t trials = ScenarioConfig{}.trials;
  std::string sampler = "hs";
  std::string purity_band;
  int unmeasured = 1;
  std::string estimators;
  std::string distances;
  std::string out;
  std::string config;
  int threads = 0;
  std::size_t com_samples = kDefaultComSamples;
  std::size_t area_samples = 10'000;
  bool gradient_only = false;
  bool continuation = false;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--seed", f.seed, "Random seed");
  app->add_option("--trials", f.trials, "Number of trials");
  app->add_option("--sampler", f.sampler, "hs|eig|puremix|pure|rank2|mixed|factorized");
  app->add_option("--purity-band", f.purity_band, "Purity filter lo,hi");
  app->add_option("--unmeasured", f.unmeasured, "Unmeasured bases (1 or 2)");
  app->add_option("--estimators", f.estimators,
                  "Comma list of mvne,mse_mub,mse_random_basis,com,random,ensemble_mse");
  app->add_option("--distances", f.distances, "Comma list of hs,fidelity,relative_entropy,ratio_sqrt_area");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--config", f.config, "JSON config; its fields override the flags");
  app->add_option("--threads", f.threads, "Worker threads (0: all cores)");
  app->add_option("--com-samples", f.com_samples, "Region samples per COM estimate");
  app->add_option("--area-samples", f.area_samples, "Proposals per area estimate");
  app->add_flag("--gradient-only", f.gradient_only, "Disable Newton steps");
  app->add_flag("--continuation", f.continuation, "Decreasing barrier weights for MSE");
}

ScenarioConfig build_config(const CommonFlags& f, ScenarioConfig c) {
  c.seed = f.seed;
  c.trials = f.trials;
  c.sampler = parse_sampler(f.sampler);
  if (!f.purity_band.empty()) {
    const auto parts = split_csv(f.purity_band);
    if (parts.size() != 2) throw ConfigError("--purity-band needs lo,hi");
    try {
      c.sampler.purity_band = std::make_pair(std::stod(parts[0]), std::stod(parts[1]));
    } catch (const std::exception&) {
      throw ConfigError("--purity-band needs two numbers");
    }
  }
  c.unmeasured_count = f.unmeasured;
  if (!f.estimators.empty()) {
    c.estimators.clear();
    for (const auto& e : split_csv(f.estimators)) c.estimators.push_back(parse_estimator(e));
  }
  if (!f.distances.empty()) {
    c.distances.clear();
    for (const auto& d : split_csv(f.distances)) c.distances.push_back(parse_distance(d));
  }
  c.out_dir = f.out;
  c.threads = f.threads;
  c.com_samples = f.com_samples;
  c.area_samples = f.area_samples;
  c.optimizer.newton = !f.gradient_only;
  c.optimizer.continuation = f.continuation;
  if (!f.config.empty()) apply_config(c, read_json_file(f.config));
  c.validate();
  return c;
}

void print_summary(const SummaryTable& s) {
  std::printf("trials %zu, failed %zu (%.2f%%), %.1f s\n", s.trials, s.failed, 100.0 * s.failure_rate,
              s.wall_time_seconds);
  for (const auto& row : s.rows) {
    std::printf("%-18s", to_string(row.kind).c_str());
    for (const auto& [d, st] : row.stats) {
      std::printf("  %s %.4f +- %.4f", to_string(d).c_str(), st.mean, st.std_error);
    }
    std::printf("\n");
  }
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

PriorData load_prior(const std::string& path) { return prior_from_json(read_json_file(path)); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Incomplete qutrit tomography: estimators, permissible regions, benchmarks"};
  app.require_subcommand(1);

  CommonFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "Run a benchmark scenario");
  add_common(bench, bench_flags);

  CommonFlags ratio_flags;
  ratio_flags.sampler = "rank2";
  ratio_flags.estimators = "mvne,mse_mub,com,random";
  int ratio_bins = 40;
  double ratio_hi = 2.0;
  auto* ratio = app.add_subcommand("ratio", "Distance / sqrt(area) histograms");
  add_common(ratio, ratio_flags);
  ratio->add_option("--bins", ratio_bins, "Histogram bins");
  ratio->add_option("--max", ratio_hi, "Upper histogram edge");

  std::string prior_path;
  std::string method = "mvne";
  std::uint64_t seed = 1;
  std::string out;
  auto* estimate = app.add_subcommand("estimate", "Estimate from a prior JSON file");
  estimate->add_option("--prior", prior_path, "Prior JSON")->required();
  estimate->add_option("--method", method, "mvne|mse|com|random|ensemble_mse");
  estimate->add_option("--seed", seed, "Random seed");
  estimate->add_option("--out", out, "Output file (default stdout)");

  int grid_n = 101;
  int angles = kDefaultBoundaryAngles;
  auto* region = app.add_subcommand("region", "Grid and boundary CSV for plotting");
  region->add_option("--prior", prior_path, "Prior JSON")->required();
  region->add_option("--grid", grid_n, "Grid points per simplex edge");
  region->add_option("--angles", angles, "Boundary rays");
  region->add_option("--out", out, "Output directory")->required();

  std::size_t area_n = 100'000;
  auto* area = app.add_subcommand("area", "Counting-measure area of the permissible region");
  area->add_option("--prior", prior_path, "Prior JSON")->required();
  area->add_option("--samples", area_n, "Proposals");
  area->add_option("--seed", seed, "Random seed");
  area->add_option("--out", out, "Output file (default stdout)");

  auto* boundary = app.add_subcommand("boundary", "Boundary mesh CSV");
  boundary->add_option("--prior", prior_path, "Prior JSON")->required();
  boundary->add_option("--angles", angles, "Boundary rays");
  boundary->add_option("--out", out, "Output file (default stdout)");

  std::string sampler = "hs";
  std::string band;
  std::size_t count = 10;
  auto* sample = app.add_subcommand("sample", "Sampled true states as CSV");
  sample->add_option("--sampler", sampler, "hs|eig|puremix|pure|rank2|mixed|factorized");
  sample->add_option("--purity-band", band, "Purity filter lo,hi");
  sample->add_option("--trials", count, "Number of states");
  sample->add_option("--seed", seed, "Random seed");
  sample->add_option("--out", out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*bench) {
      const ScenarioConfig config = build_config(bench_flags, ScenarioConfig{});
      const BenchResult r = run_benchmark(config);
      print_summary(r.summary);
      return r.summary.failure_rate > 0.5 ? kExitTrialFailure : kExitOk;
    }
    if (*ratio) {
      ScenarioConfig base;
      base.distances = {DistanceKind::Hs, DistanceKind::RatioSqrtArea};
      const ScenarioConfig config = build_config(ratio_flags, base);
      const RatioAnalysis r = ratio_analysis(config, ratio_bins, ratio_hi);
      print_summary(r.bench.summary);
      for (const auto& [kind, h] : r.histograms) {
        std::printf("%-18s ratio mode %.3f\n", to_string(kind).c_str(), h.mode_center());
      }
      return r.bench.summary.failure_rate > 0.5 ? kExitTrialFailure : kExitOk;
    }
    if (*estimate) {
      const PriorData prior = load_prior(prior_path);
      const Rng rng(seed);
      Estimate e;
      if (method == "mvne") {
        e = mvne(prior);
      } else if (method == "mse") {
        e = mse(prior);
      } else if (method == "com") {
        e = com(prior, kDefaultComSamples, rng);
      } else if (method == "random") {
        e = random_estimator(prior, rng);
      } else if (method == "ensemble_mse") {
        e = ensemble_mse(prior, 20, rng).estimate;
      } else {
        throw ConfigError("unknown method '" + method + "'");
      }
      emit(out, estimate_to_json(e).dump(2) + "\n");
      return kExitOk;
    }
    if (*region) {
      const PriorData prior = load_prior(prior_path);
      std::ostringstream grid_csv;
      std::ostringstream boundary_csv;
      emit_region_plot_data(prior, grid_n, grid_csv, boundary_csv, angles);
      write_text_file(out + "/region_grid.csv", grid_csv.str());
      write_text_file(out + "/region_boundary.csv", boundary_csv.str());
      return kExitOk;
    }
    if (*area) {
      const PriorData prior = load_prior(prior_path);
      emit(out, area_to_json(region_area(prior, area_n, Rng(seed))).dump(2) + "\n");
      return kExitOk;
    }
    if (*boundary) {
      const PriorData prior = load_prior(prior_path);
      const MinEigAscent deepest = locate_interior(prior);
      const BoundaryMesh mesh = trace_boundary(prior, angles, prior.lift(deepest.u));
      std::ostringstream csv;
      csv << "angle,p1,p2,p3,min_eig,on_simplex_edge\n";
      csv.precision(12);
      for (std::size_t i = 0; i < mesh.points.size(); ++i) {
        const auto& p = mesh.points[i];
        csv << mesh.angles[i] << ',' << p(0) << ',' << p(1) << ',' << p(2) << ','
            << mesh.min_eigs[i] << ',' << (mesh.on_simplex_edge[i] ? 1 : 0) << '\n';
      }
      emit(out, csv.str());
      return kExitOk;
    }
    if (*sample) {
      CommonFlags f;
      f.sampler = sampler;
      f.purity_band = band;
      const ScenarioConfig config = build_config(f, ScenarioConfig{});
      std::ostringstream csv;
      csv << "index,purity";
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) csv << ",re" << r << c << ",im" << r << c;
      csv << '\n';
      csv.precision(12);
      const Rng root(seed);
      for (std::size_t i = 0; i < count; ++i) {
        Rng rng = root.split(i);
        const DensityMatrix rho = sample_state(config.sampler, rng);
        csv << i << ',' << purity(rho);
        for (int r = 0; r < 3; ++r)
          for (int c = 0; c < 3; ++c) csv << ',' << rho(r, c).real() << ',' << rho(r, c).imag();
        csv << '\n';
      }
      emit(out, csv.str());
      return kExitOk;
    }
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "i/o error: %s\n", e.what());
    return kExitIo;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitOk;
}
