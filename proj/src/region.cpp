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

#include "qtomo/region.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtomo/error.hpp"

namespace qtomo {

namespace {

double min_eig_reduced(const PriorData& prior, const Eigen::VectorXd& u) {
  return eig_hermitian(prior.rho_reduced(u)).values(0);
}

// Least-norm element of {(Tr(W A_j))_j : W >= 0, Tr W = 1} where A_j are the
// reduced directions compressed onto the eigenvectors whose eigenvalues lie
// within `delta` of the smallest one. Frank-Wolfe on the spectraplex.
Eigen::VectorXd ascent_direction(const EigenSystem& es, const PriorData& prior, double delta) {
  const int n = prior.reduced_dim();
  int r = 1;
  while (r < 3 && es.values(r) - es.values(0) <= delta) ++r;
  const auto& dirs = prior.reduced_directions();

  Eigen::VectorXd a(n);
  if (r == 1) {
    const Vector3c e = es.vectors.col(0);
    for (int j = 0; j < n; ++j) a(j) = e.dot(dirs[j] * e).real();
    return a;
  }

  const Eigen::MatrixXcd p = es.vectors.leftCols(r);
  std::vector<Eigen::MatrixXcd> compressed(n);
  for (int j = 0; j < n; ++j) compressed[j] = p.adjoint() * dirs[j] * p;
  for (int j = 0; j < n; ++j) a(j) = compressed[j](0, 0).real();

  for (int it = 0; it < 200; ++it) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(r, r);
    for (int j = 0; j < n; ++j) c += a(j) * compressed[j];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(0.5 * (c + c.adjoint()));
    const Eigen::VectorXcd v = solver.eigenvectors().col(0);
    Eigen::VectorXd vertex(n);
    for (int j = 0; j < n; ++j) vertex(j) = v.dot(compressed[j] * v).real();
    const Eigen::VectorXd d = vertex - a;
    const double gap = -a.dot(d);
    if (gap <= 1e-16 * std::max(1.0, a.squaredNorm())) break;
    const double gamma = std::clamp(gap / d.squaredNorm(), 0.0, 1.0);
    a += gamma * d;
  }
  return a;
}

// Largest mu >= 0 keeping center + lift * (u + mu d) inside the simplex(es).
double simplex_exit(const PriorData& prior, const Eigen::VectorXd& u, const Eigen::VectorXd& d) {
  const Eigen::VectorXd p = prior.lift(u);
  const Eigen::VectorXd dp = prior.lift_matrix() * d;
  double mu = std::numeric_limits<double>::infinity();
  for (int i = 0; i < p.size(); ++i) {
    if (dp(i) < 0.0) mu = std::min(mu, std::max(0.0, p(i)) / -dp(i));
  }
  return mu;
}

bool member_reduced(const PriorData& prior, const Eigen::VectorXd& u) {
  return is_psd_cholesky(prior.rho_reduced(u), kPsdTol);
}

// Bisects mu in [0, mu_hi] for the last feasible point on the ray.
double ray_exit(const PriorData& prior, const Eigen::VectorXd& u, const Eigen::VectorXd& d,
                bool* on_edge) {
  const double mu_hi = simplex_exit(prior, u, d);
  if (member_reduced(prior, u + mu_hi * d)) {
    if (on_edge) *on_edge = true;
    return mu_hi;
  }
  if (on_edge) *on_edge = false;
  double lo = 0.0;
  double hi = mu_hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (member_reduced(prior, u + mid * d)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

// Uniform on each simplex: spacings of two sorted uniforms.
void dirichlet_uniform(int slots, Rng& rng, Eigen::VectorXd& p) {
  for (int b = 0; b < slots; ++b) {
    double x = rng.uniform();
    double y = rng.uniform();
    if (x > y) std::swap(x, y);
    p(3 * b) = x;
    p(3 * b + 1) = y - x;
    p(3 * b + 2) = 1.0 - y;
  }
}

// Parallelepiped center + axes * [-1, 1]^n around the region.
struct Envelope {
  Eigen::VectorXd center;
  Eigen::MatrixXd axes;
};

std::vector<Eigen::VectorXd> probe_directions(int n, int count, Rng& rng) {
  std::vector<Eigen::VectorXd> dirs;
  if (n == 2) {
    for (int i = 0; i < count; ++i) {
      const double t = 2.0 * std::numbers::pi * i / count;
      dirs.push_back(Eigen::Vector2d(std::sin(t), std::cos(t)));
    }
    return dirs;
  }
  for (int j = 0; j < n; ++j) {
    dirs.push_back(Eigen::VectorXd::Unit(n, j));
    dirs.push_back(-Eigen::VectorXd::Unit(n, j));
  }
  while (static_cast<int>(dirs.size()) < count) {
    Eigen::VectorXd d(n);
    for (int j = 0; j < n; ++j) d(j) = rng.normal();
    dirs.push_back(d.normalized());
  }
  return dirs;
}

// Rays from the interior point in a frame whitened by the covariance of a
// first round of boundary points, so elongated regions are still covered.
Envelope fit_envelope(const PriorData& prior, const Eigen::VectorXd& interior, Rng& rng) {
  const int n = prior.reduced_dim();
  const int count = n == 2 ? 128 : 384;
  Eigen::MatrixXd shape = Eigen::MatrixXd::Identity(n, n);
  Envelope env;
  env.center = interior;
  for (int round = 0; round < 2; ++round) {
    std::vector<Eigen::VectorXd> hits;
    for (const auto& w : probe_directions(n, count, rng)) {
      Eigen::VectorXd d = shape * w;
      const double len = d.norm();
      if (!(len > 0.0)) continue;
      d /= len;
      const double mu = ray_exit(prior, interior, d, nullptr);
      hits.push_back(interior + mu * d);
    }
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (const auto& h : hits) cov += (h - interior) * (h - interior).transpose();
    cov /= static_cast<double>(hits.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd evals = es.eigenvalues().cwiseMax(1e-30);
    shape = es.eigenvectors() * evals.cwiseSqrt().asDiagonal();

    // Extent of the hits along the whitened axes.
    const Eigen::MatrixXd inv = evals.cwiseSqrt().cwiseInverse().asDiagonal() *
                                es.eigenvectors().transpose();
    Eigen::VectorXd lo = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd hi = Eigen::VectorXd::Zero(n);
    for (const auto& h : hits) {
      const Eigen::VectorXd z = inv * (h - interior);
      lo = lo.cwiseMin(z);
      hi = hi.cwiseMax(z);
    }
    const Eigen::VectorXd mid = 0.5 * (lo + hi);
    const Eigen::VectorXd half = (0.5 * (hi - lo)).cwiseMax(1e-12) * 1.15;
    env.center = interior + shape * mid;
    env.axes = shape * half.asDiagonal();
  }
  return env;
}

}  // namespace

bool membership(const Eigen::VectorXd& p, const PriorData& prior, double tol) {
  return is_psd_cholesky(prior.rho(p), tol);
}

double min_eig_field(const Eigen::VectorXd& p, const PriorData& prior) {
  return min_eigen(prior.rho(p)).value;
}

MinEigGradient grad_min_eig(const Eigen::VectorXd& u, const PriorData& prior) {
  const EigenSystem es = eig_hermitian(prior.rho_reduced(u));
  MinEigGradient out;
  out.value = es.values(0);
  out.gap = es.values(1) - es.values(0);
  out.degenerate = out.gap <= 1e-10;
  out.grad = ascent_direction(es, prior, -1.0);
  return out;
}

MinEigAscent maximize_min_eig(const PriorData& prior, const Eigen::VectorXd& start_u,
                              const AscentOptions& opts, double stop_at) {
  MinEigAscent out;
  out.u = start_u;
  double delta = 0.0;
  double best = -std::numeric_limits<double>::infinity();
  int stale = 0;
  for (out.iterations = 0; out.iterations < opts.max_iters; ++out.iterations) {
    const EigenSystem es = eig_hermitian(prior.rho_reduced(out.u));
    out.value = es.values(0);
    if (out.value >= stop_at) break;
    if (out.value > best + 1e-14) {
      best = out.value;
      stale = 0;
    } else if (++stale > 50) {
      break;
    }

    const Eigen::VectorXd d = ascent_direction(es, prior, delta);
    const double dd = d.squaredNorm();
    if (dd < 1e-28) break;

    double t = 1.0;
    bool accepted = false;
    while (t > 1e-12) {
      if (min_eig_reduced(prior, out.u + t * d) >= out.value + opts.armijo_alpha * t * dd) {
        accepted = true;
        break;
      }
      t *= opts.armijo_beta;
    }
    if (!accepted || t < 1e-6) {
      // Likely stuck on an eigenvalue crossing: widen the cluster.
      if (delta >= 1e-1 && !accepted) break;
      delta = delta == 0.0 ? 1e-8 : std::min(1e-1, delta * 10.0);
      if (!accepted) continue;
    } else if (t == 1.0 && delta > 0.0) {
      delta = delta <= 1e-8 ? 0.0 : delta / 10.0;
    }
    out.u += t * d;
  }
  out.value = min_eig_reduced(prior, out.u);
  return out;
}

Eigen::VectorXd find_feasible(const PriorData& prior, const std::optional<Eigen::VectorXd>& start_u,
                              const AscentOptions& opts) {
  const Eigen::VectorXd u0 = start_u.value_or(Eigen::VectorXd::Zero(prior.reduced_dim()));
  const MinEigAscent r = maximize_min_eig(prior, u0, opts, 0.0);
  if (r.value < 0.0) {
    throw InfeasibleRegionSuspected("no feasible point found; best lambda_min = " +
                                    std::to_string(r.value));
  }
  return prior.lift(r.u);
}

MinEigAscent locate_interior(const PriorData& prior, double margin) {
  const MinEigAscent r = maximize_min_eig(prior, Eigen::VectorXd::Zero(prior.reduced_dim()));
  if (r.value < margin) {
    throw InfeasibleRegionSuspected("permissible region is point-like or empty; max lambda_min = " +
                                    std::to_string(r.value));
  }
  return r;
}

RegionSamples sample_region(const PriorData& prior, std::size_t n, const Rng& rng,
                            const SamplingOptions& opts) {
  if (n == 0) throw Error("sample_region: n must be positive");
  RegionSamples out;
  out.points.reserve(n);
  std::uint64_t stream = 0;
  Eigen::VectorXd p(prior.dim());

  // Uniform proposals on the simplex (product of simplices).
  while (out.points.size() < n && out.proposals < opts.budget) {
    Rng chunk_rng = rng.split(stream++);
    for (std::size_t i = 0; i < opts.chunk && out.points.size() < n; ++i) {
      dirichlet_uniform(prior.num_unmeasured(), chunk_rng, p);
      ++out.proposals;
      if (membership(p, prior)) out.points.push_back(p);
    }
    if (out.proposals >= opts.pilot) {
      const double rate = static_cast<double>(out.points.size()) / static_cast<double>(out.proposals);
      const double needed = static_cast<double>(n - out.points.size()) / std::max(rate, 1e-300);
      if (rate < opts.fallback_acceptance ||
          static_cast<double>(out.proposals) + needed > static_cast<double>(opts.budget)) {
        break;
      }
    }
  }
  if (out.points.size() >= n) return out;

  // Localized envelope. Discard the uniform draws so every returned point
  // comes from one proposal law.
  out.points.clear();
  out.localized = true;
  MinEigAscent interior;
  try {
    interior = locate_interior(prior);
  } catch (const InfeasibleRegionSuspected& e) {
    throw RegionTooSmall(std::string("sample_region: ") + e.what());
  }
  Rng fit_rng = rng.split(0xe11f5eedULL);
  Envelope env = fit_envelope(prior, interior.u, fit_rng);
  const int dim = prior.reduced_dim();
  std::uint64_t env_stream = 1ULL << 40;
  while (out.points.size() < n) {
    if (out.proposals >= opts.budget) {
      throw RegionTooSmall("sample_region: proposal budget exhausted");
    }
    Rng chunk_rng = rng.split(env_stream++);
    for (std::size_t i = 0; i < opts.chunk && out.points.size() < n; ++i) {
      Eigen::VectorXd z(dim);
      for (int j = 0; j < dim; ++j) z(j) = chunk_rng.uniform(-1.0, 1.0);
      const Eigen::VectorXd u = env.center + env.axes * z;
      ++out.proposals;
      const Eigen::VectorXd p = prior.lift(u);
      if ((p.array() < 0.0).any() || !membership(p, prior)) continue;
      if (z.cwiseAbs().maxCoeff() > 0.99) {
        // The region touches the envelope, so it may be clipped: enlarge and
        // restart to keep the draws uniform.
        env.axes *= 1.5;
        out.points.clear();
        break;
      }
      out.points.push_back(p);
    }
  }
  return out;
}

SimplexPoint boundary_point(const PriorData& prior, const Eigen::Vector2d& interior_u, double angle,
                            bool* on_edge) {
  const Eigen::VectorXd d = Eigen::Vector2d(std::sin(angle), std::cos(angle));
  const Eigen::VectorXd u = interior_u;
  const double mu = ray_exit(prior, u, d, on_edge);
  return prior.lift(u + mu * d);
}

BoundaryMesh trace_boundary(const PriorData& prior, int n_angles, const SimplexPoint& interior) {
  if (prior.num_unmeasured() != 1) throw Error("trace_boundary: needs exactly one unmeasured basis");
  if (n_angles < 1) throw Error("trace_boundary: n_angles must be positive");
  if (!membership(interior, prior)) throw Error("trace_boundary: interior point is infeasible");
  const Eigen::Vector2d u0 = prior.reduce(interior);
  BoundaryMesh mesh;
  for (int i = 0; i < n_angles; ++i) {
    const double angle = 2.0 * std::numbers::pi * i / n_angles;
    bool edge = false;
    const SimplexPoint p = boundary_point(prior, u0, angle, &edge);
    mesh.angles.push_back(angle);
    mesh.points.push_back(p);
    mesh.min_eigs.push_back(min_eig_field(p, prior));
    mesh.on_simplex_edge.push_back(edge);
  }
  return mesh;
}

BoundaryEntropyMinimum min_entropy_boundary_state(const PriorData& prior, int n_angles) {
  if (prior.num_unmeasured() != 1) {
    throw Error("min_entropy_boundary_state: needs exactly one unmeasured basis");
  }
  const MinEigAscent deepest = maximize_min_eig(prior, Eigen::VectorXd::Zero(2));
  if (deepest.value < -kPsdTol) {
    throw InfeasibleRegionSuspected("min_entropy_boundary_state: no feasible point");
  }
  const Eigen::Vector2d u0 = deepest.u;
  auto entropy_at = [&](double angle) {
    const SimplexPoint p = boundary_point(prior, u0, angle);
    const Eigen::Vector3d ev = eig_hermitian(prior.rho(p)).values.cwiseMax(0.0);
    return entropy_of(std::span<const double>(ev.data(), 3));
  };

  const BoundaryMesh mesh = trace_boundary(prior, n_angles, prior.lift(u0));
  int best = 0;
  double best_s = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n_angles; ++i) {
    const Eigen::Vector3d ev = eig_hermitian(prior.rho(mesh.points[i])).values.cwiseMax(0.0);
    const double s = entropy_of(std::span<const double>(ev.data(), 3));
    if (s < best_s) {
      best_s = s;
      best = i;
    }
  }

  // Golden-section refinement between the neighbouring mesh angles.
  const double step = 2.0 * std::numbers::pi / n_angles;
  double a = mesh.angles[best] - step;
  double b = mesh.angles[best] + step;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - g * (b - a);
  double d = a + g * (b - a);
  double fc = entropy_at(c);
  double fd = entropy_at(d);
  for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = entropy_at(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = entropy_at(d);
    }
  }
  BoundaryEntropyMinimum out{mesh.points[best], best_s, mesh.angles[best]};
  const double angle = 0.5 * (a + b);
  const double s = entropy_at(angle);
  if (s < out.entropy) out = {boundary_point(prior, u0, angle), s, angle};
  return out;
}

}  // namespace qtomo
