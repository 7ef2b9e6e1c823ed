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

#include "qtomo/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "qtomo/error.hpp"

namespace qtomo {

namespace {

Json stats_json(const DistanceStats& s) {
  auto num = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
  return {{"mean", num(s.mean)}, {"stderr", num(s.std_error)}, {"n", s.n}};
}

std::string sampler_name(const Json& j) {
  if (!j.is_string()) throw ConfigError("sampler must be a string tag");
  return j.get<std::string>();
}

}  // namespace

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void ensure_directory(const std::string& path) {
  std::error_code ec;
  std::filesystem::create_directories(path, ec);
  if (ec) throw IoError("cannot create directory " + path + ": " + ec.message());
}

void write_text_file(const std::string& path, const std::string& content) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) ensure_directory(parent.string());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << content;
  if (!out) throw IoError("write failed for " + path);
}

void apply_config(ScenarioConfig& c, const Json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "trials") {
        c.trials = v.get<std::size_t>();
      } else if (key == "sampler") {
        const auto band = c.sampler.purity_band;
        const auto alpha = c.sampler.dirichlet_alpha;
        c.sampler = parse_sampler(sampler_name(v));
        if (!c.sampler.purity_band) c.sampler.purity_band = band;
        c.sampler.dirichlet_alpha = alpha;
      } else if (key == "purity_band") {
        if (v.is_null()) {
          c.sampler.purity_band.reset();
        } else {
          const auto b = v.get<std::vector<double>>();
          if (b.size() != 2) throw ConfigError("purity_band needs two numbers");
          c.sampler.purity_band = std::make_pair(b[0], b[1]);
        }
      } else if (key == "dirichlet_alpha") {
        const auto a = v.get<std::vector<double>>();
        if (a.size() != 3) throw ConfigError("dirichlet_alpha needs three numbers");
        c.sampler.dirichlet_alpha = {a[0], a[1], a[2]};
      } else if (key == "unmeasured") {
        c.unmeasured_count = v.get<int>();
      } else if (key == "estimators") {
        c.estimators.clear();
        for (const auto& e : v) c.estimators.push_back(parse_estimator(e.get<std::string>()));
      } else if (key == "distances") {
        c.distances.clear();
        for (const auto& d : v) c.distances.push_back(parse_distance(d.get<std::string>()));
      } else if (key == "com_samples") {
        c.com_samples = v.get<std::size_t>();
      } else if (key == "area_samples") {
        c.area_samples = v.get<std::size_t>();
      } else if (key == "ensemble_bases") {
        c.ensemble_bases = v.get<int>();
      } else if (key == "out") {
        c.out_dir = v.get<std::string>();
      } else if (key == "threads") {
        c.threads = v.get<int>();
      } else if (key == "optimizer") {
        for (const auto& [ok, ov] : v.items()) {
          if (ok == "armijo_alpha") c.optimizer.armijo_alpha = ov.get<double>();
          else if (ok == "armijo_beta") c.optimizer.armijo_beta = ov.get<double>();
          else if (ok == "barrier_t") c.optimizer.barrier_t = ov.get<double>();
          else if (ok == "grad_tol") c.optimizer.grad_tol = ov.get<double>();
          else if (ok == "max_iters") c.optimizer.max_iters = ov.get<int>();
          else if (ok == "hessian_quadform_tol") c.optimizer.hessian_quadform_tol = ov.get<double>();
          else if (ok == "newton") c.optimizer.newton = ov.get<bool>();
          else if (ok == "continuation") c.optimizer.continuation = ov.get<bool>();
          else throw ConfigError("unknown optimizer key '" + ok + "'");
        }
      } else if (key == "sampling") {
        for (const auto& [sk, sv] : v.items()) {
          if (sk == "budget") c.sampling.budget = sv.get<std::size_t>();
          else if (sk == "pilot") c.sampling.pilot = sv.get<std::size_t>();
          else if (sk == "fallback_acceptance") c.sampling.fallback_acceptance = sv.get<double>();
          else if (sk == "chunk") c.sampling.chunk = sv.get<std::size_t>();
          else throw ConfigError("unknown sampling key '" + sk + "'");
        }
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Json config_to_json(const ScenarioConfig& c) {
  Json est = Json::array();
  for (auto e : c.estimators) est.push_back(to_string(e));
  Json dist = Json::array();
  for (auto d : c.distances) dist.push_back(to_string(d));
  Json j = {
      {"seed", c.seed},
      {"trials", c.trials},
      {"sampler", sampler_tag(c.sampler)},
      {"dirichlet_alpha", c.sampler.dirichlet_alpha},
      {"unmeasured", c.unmeasured_count},
      {"estimators", est},
      {"distances", dist},
      {"com_samples", c.com_samples},
      {"area_samples", c.area_samples},
      {"ensemble_bases", c.ensemble_bases},
      {"optimizer",
       {{"armijo_alpha", c.optimizer.armijo_alpha},
        {"armijo_beta", c.optimizer.armijo_beta},
        {"barrier_t", c.optimizer.barrier_t},
        {"grad_tol", c.optimizer.grad_tol},
        {"max_iters", c.optimizer.max_iters},
        {"hessian_quadform_tol", c.optimizer.hessian_quadform_tol},
        {"newton", c.optimizer.newton},
        {"continuation", c.optimizer.continuation}}},
      {"sampling",
       {{"budget", c.sampling.budget},
        {"pilot", c.sampling.pilot},
        {"fallback_acceptance", c.sampling.fallback_acceptance},
        {"chunk", c.sampling.chunk}}},
  };
  j["purity_band"] = c.sampler.purity_band
                         ? Json::array({c.sampler.purity_band->first, c.sampler.purity_band->second})
                         : Json(nullptr);
  return j;
}

Json summary_to_json(const ScenarioConfig& config, const SummaryTable& s) {
  Json est = Json::object();
  for (const auto& row : s.rows) {
    Json d = Json::object();
    for (const auto& [kind, stats] : row.stats) d[to_string(kind)] = stats_json(stats);
    est[to_string(row.kind)] = d;
  }
  return {{"config", config_to_json(config)},
          {"estimators", est},
          {"trials", s.trials},
          {"failed_trials", s.failed},
          {"failure_rate", s.failure_rate},
          {"wall_time_seconds", s.wall_time_seconds}};
}

PriorData prior_from_json(const Json& j) {
  try {
    std::vector<MeasuredProbabilities> measured;
    for (const auto& m : j.at("measured")) {
      MeasuredProbabilities mp;
      mp.basis_index = m.at("basis").get<int>();
      const auto p = m.at("probs").get<std::vector<double>>();
      if (p.size() != 3) throw ConfigError("each measured basis needs three probabilities");
      mp.probs = SimplexPoint(p[0], p[1], p[2]);
      measured.push_back(mp);
    }
    PriorData prior(qutrit_mub(), std::move(measured));
    if (j.contains("unmeasured") && j.at("unmeasured").get<std::vector<int>>() != prior.unmeasured()) {
      throw ConfigError("'unmeasured' does not match the measured bases");
    }
    return prior;
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("prior: ") + e.what());
  }
}

Json prior_to_json(const PriorData& prior) {
  Json measured = Json::array();
  for (const auto& m : prior.measured()) {
    measured.push_back({{"basis", m.basis_index}, {"probs", {m.probs(0), m.probs(1), m.probs(2)}}});
  }
  return {{"measured", measured}, {"unmeasured", prior.unmeasured()}};
}

Json estimate_to_json(const Estimate& e) {
  Json rho = Json::array();
  for (int r = 0; r < 3; ++r) {
    Json row = Json::array();
    for (int c = 0; c < 3; ++c) row.push_back({e.rho(r, c).real(), e.rho(r, c).imag()});
    rho.push_back(row);
  }
  return {{"method", e.method_tag},
          {"point", std::vector<double>(e.point.data(), e.point.data() + e.point.size())},
          {"rho", rho},
          {"objective", e.objective_value},
          {"iterations", e.iterations},
          {"status", to_string(e.status)}};
}

Json area_to_json(const AreaResult& a) {
  return {{"area", a.area}, {"std_error", a.std_error}, {"n", a.n_samples},
          {"acceptance", a.acceptance_rate}};
}

}  // namespace qtomo
