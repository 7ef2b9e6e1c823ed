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

#include "qtomo/sampling.hpp"

#include <cmath>
#include <numbers>

#include "qtomo/error.hpp"

namespace qtomo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Complex complex_normal(Rng& rng) {
  const double re = rng.normal();
  return {re, rng.normal()};
}

Eigen::Vector3d dirichlet(Rng& rng, const std::array<double, 3>& alpha) {
  Eigen::Vector3d g;
  for (int i = 0; i < 3; ++i) g(i) = rng.gamma(alpha[i]);
  return g / g.sum();
}

Matrix3c phases(double a, double b, double c) {
  Matrix3c d = Matrix3c::Zero();
  d(0, 0) = std::polar(1.0, a);
  d(1, 1) = std::polar(1.0, b);
  d(2, 2) = std::polar(1.0, c);
  return d;
}

}  // namespace

SamplerSpec parse_sampler(const std::string& tag) {
  SamplerSpec spec;
  if (tag == "hs") {
    spec.kind = SamplerKind::HilbertSchmidt;
  } else if (tag == "eig") {
    spec.kind = SamplerKind::EigSimplex;
  } else if (tag == "puremix") {
    spec.kind = SamplerKind::PureMix;
  } else if (tag == "pure") {
    spec.kind = SamplerKind::Pure;
  } else if (tag == "factorized") {
    spec.kind = SamplerKind::FactorizedUnitary;
  } else if (tag == "rank2") {
    spec.kind = SamplerKind::Rank2;
  } else if (tag == "mixed") {
    spec.kind = SamplerKind::HilbertSchmidt;
    spec.purity_band = std::make_pair(1.0 / 3.0, 0.5);
  } else {
    throw ConfigError("unknown sampler '" + tag + "'");
  }
  return spec;
}

std::string sampler_tag(const SamplerSpec& spec) {
  switch (spec.kind) {
    case SamplerKind::HilbertSchmidt:
      return spec.purity_band && spec.purity_band->first <= 1.0 / 3.0 + 1e-12 &&
                     spec.purity_band->second == 0.5
                 ? "mixed"
                 : "hs";
    case SamplerKind::EigSimplex:
      return "eig";
    case SamplerKind::PureMix:
      return "puremix";
    case SamplerKind::Pure:
      return "pure";
    case SamplerKind::FactorizedUnitary:
      return "factorized";
    case SamplerKind::Rank2:
      return "rank2";
    case SamplerKind::Fixed:
      return "fixed";
  }
  return "unknown";
}

Matrix3c haar_unitary(Rng& rng) {
  Matrix3c z;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) z(i, j) = complex_normal(rng);
  Eigen::HouseholderQR<Matrix3c> qr(z);
  const Matrix3c q = qr.householderQ();
  const Matrix3c r = qr.matrixQR().triangularView<Eigen::Upper>();
  Matrix3c u = q;
  for (int k = 0; k < 3; ++k) {
    const double mag = std::abs(r(k, k));
    if (mag > 0.0) u.col(k) *= r(k, k) / mag;
  }
  return u;
}

Matrix3c factorized_unitary(const std::array<double, 3>& theta, const std::array<double, 6>& phi) {
  const double c1 = std::cos(theta[0]), s1 = std::sin(theta[0]);
  const double c2 = std::cos(theta[1]), s2 = std::sin(theta[1]);
  const double c3 = std::cos(theta[2]), s3 = std::sin(theta[2]);
  Matrix3c o1;
  o1 << c1, -s1, 0.0,
        s1 * c2, c1 * c2, -s2,
        s1 * s2, c1 * s2, c2;
  Matrix3c o2;
  o2 << 1.0, 0.0, 0.0,
        0.0, c3, -s3,
        0.0, s3, c3;
  return phases(phi[0], phi[1], phi[2]) * o1 * phases(0.0, phi[3], phi[4]) * o2 *
         phases(0.0, 0.0, phi[5]);
}

Matrix3c sample_factorized_unitary(Rng& rng) {
  std::array<double, 6> phi;
  for (double& p : phi) p = rng.uniform(0.0, kTwoPi);
  // sin^4 t1, sin^2 t2, sin^2 t3 uniform on (0, 1).
  const double t1 = std::asin(std::pow(rng.uniform(), 0.25));
  const double t2 = std::asin(std::sqrt(rng.uniform()));
  const double t3 = std::asin(std::sqrt(rng.uniform()));
  return factorized_unitary({t1, t2, t3}, phi);
}

DensityMatrix random_pure(Rng& rng) {
  const Vector3c psi = haar_unitary(rng).col(0);
  return DensityMatrix::pure(psi);
}

DensityMatrix sample_hs(Rng& rng) {
  Matrix3c a;
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < 3; ++i) a(i, j) = complex_normal(rng);
  Matrix3c m = a * a.adjoint();
  m /= m.trace().real();
  return DensityMatrix::unchecked(0.5 * (m + m.adjoint()));
}

DensityMatrix state_from_spectrum(const Matrix3c& u, const Eigen::Vector3d& values) {
  Matrix3c m = u * values.cast<Complex>().asDiagonal() * u.adjoint();
  m = 0.5 * (m + m.adjoint());
  m /= m.trace().real();
  return DensityMatrix::unchecked(m);
}

DensityMatrix sample_eig_simplex(Rng& rng, const std::array<double, 3>& alpha) {
  for (double a : alpha) {
    if (!(a > 0.0)) throw ConfigError("dirichlet alpha entries must be positive");
  }
  const Eigen::Vector3d values = dirichlet(rng, alpha);
  return state_from_spectrum(haar_unitary(rng), values);
}

DensityMatrix pure_mix(const Vector3c& psi, double xi) {
  const double x = std::sqrt(xi);
  Matrix3c m = x * psi * psi.adjoint() / psi.squaredNorm();
  m += (1.0 - x) / 3.0 * Matrix3c::Identity();
  return DensityMatrix::unchecked(0.5 * (m + m.adjoint()));
}

DensityMatrix sample_pure_mix(Rng& rng) {
  const Vector3c psi = haar_unitary(rng).col(0);
  return pure_mix(psi, rng.uniform());
}

DensityMatrix sample_rank2(Rng& rng) {
  const double l = rng.uniform(0.5, 1.0);
  return state_from_spectrum(haar_unitary(rng), Eigen::Vector3d(l, 1.0 - l, 0.0));
}

DensityMatrix sample_state(const SamplerSpec& spec, Rng& rng) {
  auto draw = [&]() -> DensityMatrix {
    switch (spec.kind) {
      case SamplerKind::HilbertSchmidt:
        return sample_hs(rng);
      case SamplerKind::EigSimplex:
        return sample_eig_simplex(rng, spec.dirichlet_alpha);
      case SamplerKind::PureMix:
        return sample_pure_mix(rng);
      case SamplerKind::Pure:
        return random_pure(rng);
      case SamplerKind::FactorizedUnitary:
        return state_from_spectrum(sample_factorized_unitary(rng), dirichlet(rng, spec.dirichlet_alpha));
      case SamplerKind::Rank2:
        return sample_rank2(rng);
      case SamplerKind::Fixed:
        if (!spec.fixed) throw ConfigError("fixed sampler without a state");
        return *spec.fixed;
    }
    throw ConfigError("unknown sampler kind");
  };
  if (!spec.purity_band) return draw();
  const auto [lo, hi] = *spec.purity_band;
  if (lo > hi) throw ConfigError("purity band is empty");
  for (int attempt = 0; attempt < 1'000'000; ++attempt) {
    DensityMatrix rho = draw();
    const double p = purity(rho);
    if (p >= lo && p <= hi) return rho;
  }
  throw ConfigError("purity band rejected every draw");
}

}  // namespace qtomo
