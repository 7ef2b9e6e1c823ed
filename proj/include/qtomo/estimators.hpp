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
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qtomo/measurement.hpp"
#include "qtomo/region.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

enum class EstimateStatus { Converged, BoundaryOptimum, FallbackMaxMinEig, Failed };

std::string to_string(EstimateStatus status);

struct Estimate {
  Eigen::VectorXd point;  // unmeasured probabilities of the prior, 3 per slot
  DensityMatrix rho;
  double objective_value = 0.0;
  int iterations = 0;
  EstimateStatus status = EstimateStatus::Failed;
  std::string method_tag;
  Eigen::VectorXd point_std_error;  // Monte Carlo estimators only
};

struct OptimizerOptions {
  double armijo_alpha = 0.25;
  double armijo_beta = 0.5;
  double barrier_t = 1e-4;   // weight of ln lambda_min in the MSE objective
  double grad_tol = 1e-9;
  int max_iters = 5000;
  double hessian_quadform_tol = 1e-9;
  bool newton = true;        // false: plain gradient ascent
  bool continuation = false; // MSE: barrier weights 1e-2, 1e-3, ... down to barrier_t

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

// Maximum von Neumann entropy over the permissible region. Starts at the
// uniform point (or `start_u`, reduced coordinates); infeasible starts are
// first pushed inside by ascent on lambda_min. Point-like regions give the
// max-lambda_min point with status FallbackMaxMinEig.
Estimate mvne(const PriorData& prior, const OptimizerOptions& opts = {},
              const std::optional<Eigen::VectorXd>& start_u = std::nullopt);

// Maximum Shannon entropy of the outcome distribution of `future` (one basis
// per unmeasured slot), with a log barrier on lambda_min. Throws
// DegenerateFutureMeasurement when the future bases carry no information
// beyond the measured ones.
Estimate mse(const PriorData& prior, std::span<const OrthonormalBasis> future,
             const OptimizerOptions& opts = {});
// Future bases = the prior's own unmeasured bases.
Estimate mse(const PriorData& prior, const OptimizerOptions& opts = {});

inline constexpr std::size_t kDefaultComSamples = 10'000;

// Mean of n uniform draws from the region (n >= 1000).
Estimate com(const PriorData& prior, std::size_t n_samples, const Rng& rng,
             const SamplingOptions& sampling = {});

// One uniform draw from the region.
Estimate random_estimator(const PriorData& prior, const Rng& rng,
                          const SamplingOptions& sampling = {});

struct EnsembleEstimate {
  Estimate estimate;
  std::vector<Estimate> per_basis;
  int failed_draws = 0;
};

// Average of MSE estimates over n_bases Haar-random future bases (n_bases >= 10).
// Throws EnsembleTooSmall when more than half of the draws fail.
EnsembleEstimate ensemble_mse(const PriorData& prior, int n_bases, const Rng& rng,
                              const OptimizerOptions& opts = {});

struct EntropyDerivatives {
  double value = 0.0;
  Eigen::VectorXd grad;
  Eigen::MatrixXd hess;
};

// von Neumann entropy of rho_reduced(u) with gradient and Hessian in u;
// nullopt outside the region.
std::optional<EntropyDerivatives> von_neumann_derivatives(const PriorData& prior,
                                                          const Eigen::VectorXd& u);

// Shannon entropy of the unmeasured probabilities lift(u) plus
// t ln lambda_min, with its exact Hessian (Shannon part, barrier dyadic and
// the curvature of lambda_min).
std::optional<EntropyDerivatives> barrier_derivatives(const PriorData& prior,
                                                      const Eigen::VectorXd& u, double t);

// Estimate from an arbitrary point (rho recomputed from the prior).
Estimate make_estimate(const PriorData& prior, const Eigen::VectorXd& point, std::string tag);

}  // namespace qtomo
