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

#include "qtomo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qtomo/error.hpp"
#include "qtomo/region.hpp"
#include "qtomo/sampling.hpp"

namespace qtomo {

namespace {

constexpr std::size_t kAreaChunk = 4096;

Matrix3c psd_sqrt(const Matrix3c& m) {
  const EigenSystem es = eig_hermitian(0.5 * (m + m.adjoint()));
  const Eigen::Vector3d r = es.values.cwiseMax(0.0).cwiseSqrt();
  return es.vectors * r.cast<Complex>().asDiagonal() * es.vectors.adjoint();
}

}  // namespace

double hs_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return (a.matrix() - b.matrix()).norm();
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  const Matrix3c sa = psd_sqrt(a.matrix());
  const Matrix3c m = sa * b.matrix() * sa;
  const EigenSystem es = eig_hermitian(0.5 * (m + m.adjoint()));
  const double f = es.values.cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(f, 0.0, 1.0);
}

double bures_distance(const DensityMatrix& a, const DensityMatrix& b) {
  return std::sqrt(std::max(0.0, 2.0 * (1.0 - fidelity(a, b))));
}

RelativeEntropy relative_entropy(const DensityMatrix& a, const DensityMatrix& b) {
  const EigenSystem ea = eig_hermitian(a.matrix());
  const Eigen::Vector3d la = ea.values.cwiseMax(0.0);
  double value = -entropy_of(std::span<const double>(la.data(), 3));

  const EigenSystem eb = eig_hermitian(b.matrix());
  RelativeEntropy out;
  for (int k = 0; k < 3; ++k) {
    const Vector3c v = eb.vectors.col(k);
    const double weight = v.dot(a.matrix() * v).real();
    double mu = eb.values(k);
    if (mu < kRelativeEntropyFloor) {
      mu = kRelativeEntropyFloor;
      if (weight > 1e-12) out.support_mismatch = true;
    }
    value -= weight * std::log(mu);
  }
  out.value = std::max(0.0, value);
  return out;
}

DistanceReport compare(const DensityMatrix& truth, const DensityMatrix& estimate) {
  DistanceReport r;
  r.hs = hs_distance(truth, estimate);
  r.fidelity = fidelity(truth, estimate);
  r.bures = std::sqrt(std::max(0.0, 2.0 * (1.0 - r.fidelity)));
  const RelativeEntropy re = relative_entropy(truth, estimate);
  r.relative_entropy = re.value;
  r.support_mismatch = re.support_mismatch;
  return r;
}

double angular_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& q) {
  if (p.size() != q.size() || p.size() % 3 != 0) {
    throw InvalidSimplexPoint("angular_distance: sizes must match and be multiples of 3");
  }
  double sum_sq = 0.0;
  for (Eigen::Index b = 0; b < p.size(); b += 3) {
    double overlap = 0.0;
    for (int k = 0; k < 3; ++k) {
      overlap += std::sqrt(std::max(0.0, p(b + k)) * std::max(0.0, q(b + k)));
    }
    const double angle = std::acos(std::clamp(overlap, -1.0, 1.0));
    sum_sq += angle * angle;
  }
  return std::sqrt(sum_sq);
}

AreaResult region_area(const PriorData& prior, std::size_t n, const Rng& rng,
                       std::optional<double> observations) {
  if (n == 0) throw ConfigError("region_area: n must be positive");
  const int m = prior.num_unmeasured();
  std::size_t hits = 0;
  Eigen::VectorXd p(prior.dim());
  for (std::size_t start = 0, chunk = 0; start < n; start += kAreaChunk, ++chunk) {
    Rng r = rng.split(chunk);
    const std::size_t stop = std::min(n, start + kAreaChunk);
    for (std::size_t i = start; i < stop; ++i) {
      // Dirichlet(1/2, 1/2, 1/2): squared normals, normalised.
      for (int b = 0; b < m; ++b) {
        double sum = 0.0;
        for (int k = 0; k < 3; ++k) {
          const double z = r.normal();
          p(3 * b + k) = z * z;
          sum += z * z;
        }
        p.segment<3>(3 * b) /= sum;
      }
      if (membership(p, prior)) ++hits;
    }
  }
  double scale = std::pow(std::numbers::pi / 2.0, m);
  if (observations) scale *= std::pow(*observations / 2.0, 1.5 * m);

  AreaResult out;
  out.n_samples = n;
  out.acceptance_rate = static_cast<double>(hits) / static_cast<double>(n);
  out.area = scale * out.acceptance_rate;
  if (hits == 0) {
    out.no_hits = true;
    out.std_error = scale * 3.0 / static_cast<double>(n);
  } else {
    const double a = out.acceptance_rate;
    out.std_error = scale * std::sqrt(a * (1.0 - a) / static_cast<double>(n));
  }
  return out;
}

MeasurementSearch search_best_measurement(const PriorData& prior,
                                          std::span<const OrthonormalBasis> candidates,
                                          const Rng& rng, std::size_t area_samples) {
  if (prior.num_unmeasured() != 1) {
    throw Error("search_best_measurement: needs exactly one unmeasured basis");
  }
  if (candidates.empty()) throw Error("search_best_measurement: no candidates");
  MeasurementSearch out;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    const std::span<const OrthonormalBasis> one(&candidates[i], 1);
    AreaResult area;
    area.n_samples = area_samples;
    const AffineMap map = future_transform(prior, one);
    if (!map.degenerate) {
      try {
        area = region_area(prior.with_future(one), area_samples, rng);
      } catch (const DegenerateFrame&) {
      }
    }
    out.areas.push_back(area);
    if (i == 0 || area.area > out.areas[out.winner].area) out.winner = i;
  }
  out.basis = candidates[out.winner];
  out.area = out.areas[out.winner];
  return out;
}

MeasurementSearch search_best_measurement(const PriorData& prior, std::size_t n_candidates,
                                          const Rng& rng, std::size_t area_samples) {
  if (prior.num_unmeasured() != 1) {
    throw Error("search_best_measurement: needs exactly one unmeasured basis");
  }
  std::vector<OrthonormalBasis> candidates;
  candidates.push_back(prior.frame().bases()[prior.unmeasured().front()]);
  Rng draw = rng.split(0x5ea7c4ULL);
  for (std::size_t i = 0; i < n_candidates; ++i) candidates.emplace_back(haar_unitary(draw));
  return search_best_measurement(prior, candidates, rng.split(0xa4eaULL), area_samples);
}

}  // namespace qtomo
