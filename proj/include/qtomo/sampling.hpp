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

#include <array>
#include <optional>
#include <string>
#include <utility>

#include "qtomo/linalg.hpp"
#include "qtomo/rng.hpp"

namespace qtomo {

enum class SamplerKind {
  HilbertSchmidt,
  EigSimplex,
  PureMix,
  Pure,
  FactorizedUnitary,  // Dirichlet eigenvalues, eigenbasis from the angle factorization
  Rank2,              // eigenvalues (l, 1 - l, 0), l ~ U(0.5, 1)
  Fixed,              // always returns `fixed`
};

struct SamplerSpec {
  SamplerKind kind = SamplerKind::HilbertSchmidt;
  std::array<double, 3> dirichlet_alpha{1.0, 1.0, 1.0};
  std::optional<std::pair<double, double>> purity_band;  // inclusive, by rejection
  std::optional<DensityMatrix> fixed;
};

// Tags: hs, eig, puremix, pure, factorized, rank2, mixed (hs with purity <= 0.5).
SamplerSpec parse_sampler(const std::string& tag);
std::string sampler_tag(const SamplerSpec& spec);

// QR of a complex Ginibre matrix with the phases of diag(R) divided out.
Matrix3c haar_unitary(Rng& rng);

// Product of phase diagonals and real rotations; all zeros give the identity.
Matrix3c factorized_unitary(const std::array<double, 3>& theta, const std::array<double, 6>& phi);
Matrix3c sample_factorized_unitary(Rng& rng);

DensityMatrix random_pure(Rng& rng);
DensityMatrix sample_hs(Rng& rng);
DensityMatrix sample_eig_simplex(Rng& rng, const std::array<double, 3>& alpha = {1.0, 1.0, 1.0});
DensityMatrix sample_pure_mix(Rng& rng);
// x |psi><psi| + (1 - x) I / 3 with x = sqrt(xi).
DensityMatrix pure_mix(const Vector3c& psi, double xi);
DensityMatrix sample_rank2(Rng& rng);

// U diag(values) U^dagger, renormalised.
DensityMatrix state_from_spectrum(const Matrix3c& u, const Eigen::Vector3d& values);

// Draws from `spec`; the purity band is applied by rejection (ConfigError
// after 10^6 rejected draws).
DensityMatrix sample_state(const SamplerSpec& spec, Rng& rng);

}  // namespace qtomo
