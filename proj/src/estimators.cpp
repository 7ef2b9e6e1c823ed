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

#include "qtomo/estimators.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "qtomo/error.hpp"
#include "qtomo/sampling.hpp"

namespace qtomo {

namespace {

// Phase-1 target: a start this deep keeps the log terms well conditioned.
constexpr double kStartDepth = 1e-3;

using EvalFn = std::function<std::optional<EntropyDerivatives>(const Eigen::VectorXd&)>;

enum class StopRule { GradientNorm, Decrement };

struct AscentResult {
  Eigen::VectorXd u;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Damped Newton (or gradient) ascent with Armijo backtracking. Points where
// `eval` returns nullopt count as -infinity, so iterates stay inside.
AscentResult ascend(Eigen::VectorXd u, const EvalFn& eval, const OptimizerOptions& opts,
                    StopRule rule) {
  AscentResult out;
  auto cur = eval(u);
  if (!cur) throw Error("ascent started outside the region");
  int stalled = 0;
  for (out.iterations = 0; out.iterations < opts.max_iters; ++out.iterations) {
    const Eigen::VectorXd& g = cur->grad;
    const double gnorm = g.norm();
    if (rule == StopRule::GradientNorm && gnorm <= opts.grad_tol) {
      out.converged = true;
      break;
    }
    Eigen::VectorXd s = g;
    if (opts.newton) {
      Eigen::LDLT<Eigen::MatrixXd> ldlt(-cur->hess);
      if (ldlt.info() == Eigen::Success && ldlt.isPositive()) {
        const Eigen::VectorXd step = ldlt.solve(g);
        if (step.allFinite() && g.dot(step) > 0.0) s = step;
      }
    }
    const double decrement = g.dot(s);
    if (rule == StopRule::Decrement &&
        (opts.newton ? decrement : std::abs(s.dot(cur->hess * s))) < opts.hessian_quadform_tol) {
      out.converged = true;
      break;
    }

    // Below this the objective cannot resolve the predicted increase, and the
    // Armijo test would only compare round-off. Only a Newton step has a
    // natural unit length to take blindly.
    const bool roundoff = opts.newton && decrement <= 1e-13 * std::max(1.0, std::abs(cur->value));
    const double resolution = 1e-14 * std::max(1.0, std::abs(cur->value));
    double t = 1.0;
    bool unresolvable = false;
    std::optional<EntropyDerivatives> next;
    while (t > 1e-20) {
      next = eval(u + t * s);
      if (next && (roundoff || next->value >= cur->value + opts.armijo_alpha * t * decrement)) break;
      // A feasible probe whose required gain is below round-off: shrinking
      // further would only let noise pass the test.
      if (next && opts.armijo_alpha * t * decrement < resolution) {
        unresolvable = true;
        next.reset();
        break;
      }
      next.reset();
      t *= opts.armijo_beta;
    }
    if (!next) {
      // No representable increase left: at the optimum up to round-off.
      out.converged = unresolvable || decrement <= 1e-12 || gnorm <= 1e-6;
      break;
    }
    // Optima pressed against the boundary (lambda_min near 1e-16) only admit
    // steps the size of round-off; a long run of those is convergence.
    const bool negligible = (t * s).norm() <= 1e-10 * std::max(1.0, u.norm()) &&
                            next->value - cur->value <= 1e-14 * std::max(1.0, std::abs(cur->value));
    stalled = negligible ? stalled + 1 : 0;
    u += t * s;
    cur = std::move(next);
    if (stalled >= 20) {
      out.converged = true;
      ++out.iterations;
      break;
    }
  }
  out.u = u;
  out.value = cur->value;
  return out;
}

double log_divided_difference(double x, double y) {
  const double scale = std::max(x, y);
  if (std::abs(x - y) > 1e-8 * scale) return (std::log(x) - std::log(y)) / (x - y);
  return 2.0 / (x + y);
}

Estimate fallback_estimate(const PriorData& prior, const MinEigAscent& deepest, std::string tag) {
  Estimate e = make_estimate(prior, prior.lift(deepest.u), std::move(tag));
  e.objective_value = deepest.value;
  e.iterations = deepest.iterations;
  e.status = EstimateStatus::FallbackMaxMinEig;
  return e;
}

// Moves u inside the region (lambda_min >= kStartDepth if attainable).
// Returns nullopt for point-like regions, together with the deepest point.
std::optional<Eigen::VectorXd> interior_start(const PriorData& prior, const Eigen::VectorXd& u0,
                                              MinEigAscent& deepest) {
  if (eig_hermitian(prior.rho_reduced(u0)).values(0) >= kPointLikeMargin) {
    const Eigen::VectorXd p = prior.lift(u0);
    if ((p.array() > 0.0).all()) return u0;
  }
  deepest = maximize_min_eig(prior, u0, {}, kStartDepth);
  if (deepest.value < kPointLikeMargin) return std::nullopt;
  return deepest.u;
}

bool same_bases(const PriorData& prior, std::span<const OrthonormalBasis> future) {
  const auto& slots = prior.unmeasured();
  if (future.size() != slots.size()) return false;
  for (std::size_t i = 0; i < slots.size(); ++i) {
    if (future[i].kets() != prior.frame().bases()[slots[i]].kets()) return false;
  }
  return true;
}

}  // namespace

std::string to_string(EstimateStatus status) {
  switch (status) {
    case EstimateStatus::Converged:
      return "Converged";
    case EstimateStatus::BoundaryOptimum:
      return "BoundaryOptimum";
    case EstimateStatus::FallbackMaxMinEig:
      return "FallbackMaxMinEig";
    case EstimateStatus::Failed:
      return "Failed";
  }
  return "Failed";
}

void OptimizerOptions::validate() const {
  if (!(armijo_alpha > 0.0 && armijo_alpha < 0.5)) throw ConfigError("armijo_alpha must be in (0, 0.5)");
  if (!(armijo_beta > 0.0 && armijo_beta < 1.0)) throw ConfigError("armijo_beta must be in (0, 1)");
  if (!(barrier_t > 0.0)) throw ConfigError("barrier_t must be positive");
  if (!(grad_tol > 0.0)) throw ConfigError("grad_tol must be positive");
  if (max_iters < 1) throw ConfigError("max_iters must be at least 1");
  if (!(hessian_quadform_tol > 0.0)) throw ConfigError("hessian_quadform_tol must be positive");
}

Estimate make_estimate(const PriorData& prior, const Eigen::VectorXd& point, std::string tag) {
  Estimate e;
  e.point = point;
  e.rho = DensityMatrix::unchecked(prior.rho(point));
  e.method_tag = std::move(tag);
  e.status = EstimateStatus::Converged;
  return e;
}

std::optional<EntropyDerivatives> von_neumann_derivatives(const PriorData& prior,
                                                          const Eigen::VectorXd& u) {
  const EigenSystem es = eig_hermitian(prior.rho_reduced(u));
  if (!(es.values(0) > 0.0)) return std::nullopt;
  const int n = prior.reduced_dim();
  const auto& dirs = prior.reduced_directions();
  EntropyDerivatives d;
  Eigen::Vector3d logs = es.values.array().log();
  d.value = -es.values.dot(logs);
  std::vector<Matrix3c> rotated(n);
  d.grad.resize(n);
  for (int j = 0; j < n; ++j) {
    rotated[j] = es.vectors.adjoint() * dirs[j] * es.vectors;
    d.grad(j) = -(rotated[j].diagonal().real().dot(logs));
  }
  Eigen::Matrix3d f1;
  for (int i = 0; i < 3; ++i)
    for (int k = 0; k < 3; ++k) f1(i, k) = log_divided_difference(es.values(i), es.values(k));
  d.hess.resize(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      double h = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) h += f1(i, k) * (rotated[a](i, k) * rotated[b](k, i)).real();
      d.hess(a, b) = d.hess(b, a) = -h;
    }
  }
  return d;
}

std::optional<EntropyDerivatives> barrier_derivatives(const PriorData& prior,
                                                      const Eigen::VectorXd& u, double t) {
  const Eigen::VectorXd p = prior.lift(u);
  if (!(p.array() > 0.0).all()) return std::nullopt;
  const EigenSystem es = eig_hermitian(prior.rho_reduced(u));
  const double lam = es.values(0);
  if (!(lam > 0.0)) return std::nullopt;
  const int n = prior.reduced_dim();
  const Eigen::MatrixXd& q = prior.lift_matrix();
  const Eigen::VectorXd logp = p.array().log();
  std::vector<Matrix3c> rotated(n);
  Eigen::VectorXd glam(n);
  for (int j = 0; j < n; ++j) {
    rotated[j] = es.vectors.adjoint() * prior.reduced_directions()[j] * es.vectors;
    glam(j) = rotated[j](0, 0).real();
  }
  // Second-order perturbation of the smallest eigenvalue; skipped across a
  // numerically degenerate gap.
  Eigen::MatrixXd hlam = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < 3; ++k) {
    const double gap = lam - es.values(k);
    if (std::abs(gap) < 1e-12) continue;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        hlam(a, b) += 2.0 * (rotated[a](0, k) * rotated[b](k, 0)).real() / gap;
  }
  hlam = 0.5 * (hlam + hlam.transpose()).eval();
  EntropyDerivatives d;
  d.value = -p.dot(logp) + t * std::log(lam);
  d.grad = -q.transpose() * logp + (t / lam) * glam;
  d.hess = -q.transpose() * p.cwiseInverse().asDiagonal() * q + (t / lam) * hlam -
           (t / (lam * lam)) * glam * glam.transpose();
  return d;
}

Estimate mvne(const PriorData& prior, const OptimizerOptions& opts,
              const std::optional<Eigen::VectorXd>& start_u) {
  opts.validate();
  const Eigen::VectorXd u0 = start_u.value_or(Eigen::VectorXd::Zero(prior.reduced_dim()));
  MinEigAscent deepest;
  const auto start = interior_start(prior, u0, deepest);
  if (!start) return fallback_estimate(prior, deepest, "mvne");

  const AscentResult r = ascend(
      *start, [&](const Eigen::VectorXd& u) { return von_neumann_derivatives(prior, u); }, opts,
      StopRule::GradientNorm);
  Estimate e = make_estimate(prior, prior.lift(r.u), "mvne");
  e.objective_value = r.value;
  e.iterations = r.iterations + deepest.iterations;
  e.status = r.converged ? EstimateStatus::Converged : EstimateStatus::Failed;
  return e;
}

Estimate mse(const PriorData& prior, std::span<const OrthonormalBasis> future,
             const OptimizerOptions& opts) {
  opts.validate();
  if (static_cast<int>(future.size()) != prior.num_unmeasured()) {
    throw Error("mse: need one future basis per unmeasured slot");
  }
  const bool direct = same_bases(prior, future);
  std::optional<PriorData> transformed;
  if (!direct) {
    const AffineMap map = future_transform(prior, future);
    if (map.degenerate) {
      throw DegenerateFutureMeasurement("future bases add nothing to the measured data");
    }
    try {
      transformed.emplace(prior.with_future(future));
    } catch (const DegenerateFrame& e) {
      throw DegenerateFutureMeasurement(e.what());
    }
  }
  const PriorData& work = direct ? prior : *transformed;
  const std::string tag = direct ? "mse" : "mse_future";

  // Back to the prior's own coordinates.
  auto finish = [&](const Eigen::VectorXd& u) {
    const Eigen::VectorXd q = work.lift(u);
    Eigen::VectorXd point = direct ? q : prior.coordinates_of(work.rho(q));
    Estimate e = make_estimate(prior, point, tag);
    double h = 0.0;
    for (int i = 0; i < q.size(); ++i) h -= q(i) > 0.0 ? q(i) * std::log(q(i)) : 0.0;
    e.objective_value = h;
    return e;
  };

  const Eigen::VectorXd u0 = Eigen::VectorXd::Zero(work.reduced_dim());
  if (membership(work.center(), work)) {
    Estimate e = finish(u0);
    e.status = EstimateStatus::Converged;
    return e;
  }

  MinEigAscent deepest;
  const auto start = interior_start(work, u0, deepest);
  if (!start) {
    Estimate out = finish(deepest.u);
    out.objective_value = deepest.value;
    out.iterations = deepest.iterations;
    out.status = EstimateStatus::FallbackMaxMinEig;
    return out;
  }

  std::vector<double> weights;
  if (opts.continuation) {
    for (double t = 1e-2; t > opts.barrier_t * (1.0 + 1e-9); t *= 0.1) weights.push_back(t);
  }
  weights.push_back(opts.barrier_t);

  Eigen::VectorXd u = *start;
  int iterations = deepest.iterations;
  bool converged = true;
  for (double t : weights) {
    const AscentResult r = ascend(
        u, [&](const Eigen::VectorXd& v) { return barrier_derivatives(work, v, t); }, opts,
        StopRule::Decrement);
    u = r.u;
    iterations += r.iterations;
    converged = r.converged;
  }
  Estimate e = finish(u);
  e.iterations = iterations;
  e.status = converged ? EstimateStatus::BoundaryOptimum : EstimateStatus::Failed;
  return e;
}

Estimate mse(const PriorData& prior, const OptimizerOptions& opts) {
  std::vector<OrthonormalBasis> future;
  for (int slot : prior.unmeasured()) future.push_back(prior.frame().bases()[slot]);
  return mse(prior, future, opts);
}

Estimate com(const PriorData& prior, std::size_t n_samples, const Rng& rng,
             const SamplingOptions& sampling) {
  if (n_samples < 1000) throw ConfigError("com: need at least 1000 samples");
  const RegionSamples s = sample_region(prior, n_samples, rng, sampling);
  const int dim = prior.dim();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(dim);
  for (const auto& p : s.points) mean += p;
  mean /= static_cast<double>(s.points.size());
  Eigen::VectorXd var = Eigen::VectorXd::Zero(dim);
  for (const auto& p : s.points) var += (p - mean).cwiseAbs2();
  var /= static_cast<double>(s.points.size() - 1);

  Estimate e = make_estimate(prior, mean, "com");
  e.iterations = static_cast<int>(std::min<std::size_t>(s.proposals, std::numeric_limits<int>::max()));
  e.point_std_error = (var / static_cast<double>(s.points.size())).cwiseSqrt();
  return e;
}

Estimate random_estimator(const PriorData& prior, const Rng& rng, const SamplingOptions& sampling) {
  const RegionSamples s = sample_region(prior, 1, rng, sampling);
  Estimate e = make_estimate(prior, s.points.front(), "random");
  e.iterations = static_cast<int>(std::min<std::size_t>(s.proposals, std::numeric_limits<int>::max()));
  return e;
}

EnsembleEstimate ensemble_mse(const PriorData& prior, int n_bases, const Rng& rng,
                              const OptimizerOptions& opts) {
  if (n_bases < 10) throw ConfigError("ensemble_mse: need at least 10 bases");
  EnsembleEstimate out;
  Matrix3c sum = Matrix3c::Zero();
  int used = 0;
  bool fallback = false;
  for (int i = 0; i < n_bases; ++i) {
    Rng draw = rng.split(static_cast<std::uint64_t>(i));
    std::vector<OrthonormalBasis> future;
    for (int k = 0; k < prior.num_unmeasured(); ++k) future.emplace_back(haar_unitary(draw));
    try {
      Estimate e = mse(prior, future, opts);
      if (e.status == EstimateStatus::Failed) {
        ++out.failed_draws;
      } else {
        fallback = fallback || e.status == EstimateStatus::FallbackMaxMinEig;
        sum += e.rho.matrix();
        ++used;
      }
      out.per_basis.push_back(std::move(e));
    } catch (const DegenerateFutureMeasurement&) {
      ++out.failed_draws;
    }
  }
  if (2 * out.failed_draws > n_bases) {
    throw EnsembleTooSmall("ensemble_mse: " + std::to_string(out.failed_draws) + " of " +
                           std::to_string(n_bases) + " draws failed");
  }
  const Matrix3c avg = sum / static_cast<double>(used);
  out.estimate = make_estimate(prior, prior.coordinates_of(avg), "ensemble_mse");
  out.estimate.iterations = used;
  out.estimate.status = fallback ? EstimateStatus::FallbackMaxMinEig : EstimateStatus::Converged;
  return out;
}

}  // namespace qtomo
