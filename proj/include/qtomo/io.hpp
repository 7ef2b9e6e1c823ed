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

#include <string>

#include <json.hpp>

#include "qtomo/bench.hpp"
#include "qtomo/estimators.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/metrics.hpp"

namespace qtomo {

using Json = nlohmann::json;

// IoError when unreadable, ConfigError when not valid JSON.
Json read_json_file(const std::string& path);
// Creates parent directories; IoError on failure.
void write_text_file(const std::string& path, const std::string& content);
void ensure_directory(const std::string& path);

// Overrides the fields present in `j`; unknown keys are a ConfigError.
void apply_config(ScenarioConfig& config, const Json& j);
Json config_to_json(const ScenarioConfig& config);
Json summary_to_json(const ScenarioConfig& config, const SummaryTable& summary);

// {"measured": [{"basis": b, "probs": [p0, p1, p2]}, ...], "unmeasured": [...]}
PriorData prior_from_json(const Json& j);
Json prior_to_json(const PriorData& prior);

// {method, point, rho as [[re, im], ...] row-major, objective, iterations, status}
Json estimate_to_json(const Estimate& e);
// {area, std_error, n, acceptance}
Json area_to_json(const AreaResult& a);

}  // namespace qtomo
