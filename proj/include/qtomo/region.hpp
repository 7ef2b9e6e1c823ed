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
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "qtomo/measurement.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

// Regions whose largest attainable minimum eigenvalue stays below this are
// treated as point-like: no interior point can be certified.
inline constexpr double kPointLikeMargin = 1e-9;

// Points are SimplexPoint(s): 3 probabilities per unmeasured slot.
bool membership(const Eigen::VectorXd& p, const PriorData& prior, double tol = kPsdTol);
double min_eig_field(const Eigen::VectorXd& p, const PriorData& prior);

struct MinEigGradient {
  double value = 0.0;
  Eigen::VectorXd grad;  // d lambda_min / d u
  double gap = 0.0;      // lambda_2 - lambda_min
  bool degenerate = false;
};

// Gradient of lambda_min in reduced coordinates, from the eigenvector of the
// smallest eigenvalue. When the gap is below 1e-10 any vector of the
// degenerate subspace may have been used and `degenerate` is set.
MinEigGradient grad_min_eig(const Eigen::VectorXd& u, const PriorData& prior);

struct AscentOptions {
  double armijo_alpha = 0.25;
  double armijo_beta = 0.5;
  int max_iters = 5000;
};

struct MinEigAscent {
  Eigen::VectorXd u;
  double value = 0.0;
  int iterations = 0;
};

// Gradient ascent on lambda_min with Armijo backtracking. Near eigenvalue
// crossings the direction is the least-norm element of the clustered
// superdifferential. Stops early once the value reaches `stop_at`.
MinEigAscent maximize_min_eig(const PriorData& prior, const Eigen::VectorXd& start_u,
                              const AscentOptions& opts = {},
                              double stop_at = std::numeric_limits<double>::infinity());

// Returns a point with lambda_min >= 0 or throws InfeasibleRegionSuspected.
Eigen::VectorXd find_feasible(const PriorData& prior,
                              const std::optional<Eigen::VectorXd>& start_u = std::nullopt,
                              const AscentOptions& opts = {});

struct SamplingOptions {
  std::size_t budget = 10'000'000;     // proposals, both strategies combined
  std::size_t pilot = 10'000;          // uniform proposals before judging acceptance
  double fallback_acceptance = 1e-4;   // switch to the localized envelope below this
  std::size_t chunk = 4096;            // proposals per derived random stream
};

struct RegionSamples {
  std::vector<Eigen::VectorXd> points;
  std::size_t proposals = 0;
  bool localized = false;
};

// n independent uniform draws from the permissible region. Uniform simplex
// proposals first; if acceptance is too low, proposals come from a
// parallelepiped fitted around the region (located by maximising lambda_min),
// which keeps the draws exactly uniform. Throws RegionTooSmall.
RegionSamples sample_region(const PriorData& prior, std::size_t n, const Rng& rng,
                            const SamplingOptions& opts = {});

struct BoundaryMesh {
  std::vector<SimplexPoint> points;
  std::vector<double> angles;
  std::vector<double> min_eigs;
  std::vector<bool> on_simplex_edge;  // ray left the simplex before leaving the region
};

inline constexpr int kDefaultBoundaryAngles = 1024;

// Bisection along interior + mu (sin t, cos t) in reduced coordinates, one
// unmeasured basis only.
BoundaryMesh trace_boundary(const PriorData& prior, int n_angles, const SimplexPoint& interior);
SimplexPoint boundary_point(const PriorData& prior, const Eigen::Vector2d& interior_u, double angle,
                            bool* on_edge = nullptr);

struct BoundaryEntropyMinimum {
  SimplexPoint point;
  double entropy = 0.0;
  double angle = 0.0;
};

BoundaryEntropyMinimum min_entropy_boundary_state(const PriorData& prior,
                                                  int n_angles = kDefaultBoundaryAngles);

// Deepest point of the region (maximal lambda_min); throws
// InfeasibleRegionSuspected when the region is point-like or empty.
MinEigAscent locate_interior(const PriorData& prior, double margin = kPointLikeMargin);

}  // namespace qtomo
