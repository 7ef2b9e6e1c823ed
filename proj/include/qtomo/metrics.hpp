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
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qtomo/linalg.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

// sqrt(Tr (a - b)^2), unnormalised (at most sqrt 2).
double hs_distance(const DensityMatrix& a, const DensityMatrix& b);
// Tr sqrt(sqrt(a) b sqrt(a)), clamped to [0, 1].
double fidelity(const DensityMatrix& a, const DensityMatrix& b);
double bures_distance(const DensityMatrix& a, const DensityMatrix& b);

inline constexpr double kRelativeEntropyFloor = 1e-14;

struct RelativeEntropy {
  double value = 0.0;             // nats
  bool support_mismatch = false;  // a has weight where b's spectrum hits the floor
};

// Tr a (ln a - ln b), with b's eigenvalues floored at 1e-14.
RelativeEntropy relative_entropy(const DensityMatrix& a, const DensityMatrix& b);

struct DistanceReport {
  double hs = 0.0;
  double fidelity = 0.0;
  double bures = 0.0;
  double relative_entropy = 0.0;
  bool support_mismatch = false;
};

DistanceReport compare(const DensityMatrix& truth, const DensityMatrix& estimate);

// arccos sum sqrt(p_i q_i) per simplex; several simplices (3 entries each)
// combine as the root sum of squares.
double angular_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q);

struct AreaResult {
  double area = 0.0;
  double std_error = 0.0;  // no accepted draws: 3 (pi/2)^m / n, a 95% upper bound
  std::size_t n_samples = 0;
  double acceptance_rate = 0.0;
  bool no_hits = false;
};

// Counting-measure area of the region: Dirichlet(1/2) proposals per slot,
// acceptance times (pi/2)^m. `observations`, when set, multiplies by
// (N/2)^(3/2) per slot.
AreaResult region_area(const PriorData& prior, std::size_t n, const Rng& rng,
                       std::optional<double> observations = std::nullopt);

struct MeasurementSearch {
  OrthonormalBasis basis;
  AreaResult area;
  std::size_t winner = 0;               // index into `areas`
  std::vector<AreaResult> areas;        // one per candidate, in candidate order
};

// Area of the region seen through each candidate future basis (one unmeasured
// slot), all estimated with the same random stream. Degenerate candidates
// score 0. Ties go to the earlier candidate.
MeasurementSearch search_best_measurement(const PriorData& prior,
                                          std::span<const OrthonormalBasis> candidates,
                                          const Rng& rng, std::size_t area_samples = 10'000);

// Candidates: the prior's own unmeasured basis first, then n_candidates Haar
// bases drawn from rng.
MeasurementSearch search_best_measurement(const PriorData& prior, std::size_t n_candidates,
                                          const Rng& rng, std::size_t area_samples = 10'000);

}  // namespace qtomo
