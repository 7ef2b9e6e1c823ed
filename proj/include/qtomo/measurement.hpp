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
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "qtomo/linalg.hpp"

namespace qtomo {

inline constexpr int kNumBases = 4;
inline constexpr int kNumOutcomes = 12;

using Vector12 = Eigen::Matrix<double, kNumOutcomes, 1>;
using Matrix12 = Eigen::Matrix<double, kNumOutcomes, kNumOutcomes>;

// Three orthonormal kets stored as the columns of a unitary matrix.
class OrthonormalBasis {
 public:
  OrthonormalBasis() : kets_(Matrix3c::Identity()) {}
  // Throws Error unless <k_i|k_j> = delta_ij within 1e-10.
  explicit OrthonormalBasis(const Matrix3c& kets);

  const Matrix3c& kets() const { return kets_; }
  Vector3c ket(int k) const { return kets_.col(k); }
  Matrix3c projector(int k) const { return ket(k) * ket(k).adjoint(); }

 private:
  Matrix3c kets_;
};

using BasisSet = std::array<OrthonormalBasis, kNumBases>;

// Computational, Fourier and the two remaining qutrit MUB, omega = exp(-2 pi i / 3).
const BasisSet& qutrit_mub();

bool check_unbiased(const OrthonormalBasis& a, const OrthonormalBasis& b, double tol = 1e-8);

// Frame of twelve traceless operators Lambda_jk = |e_k^(j)><e_k^(j)| - I/3,
// ordered basis-major, ket-minor, with Gram matrix M and its pseudoinverse.
class Frame {
 public:
  // Throws DegenerateFrame when rank(M) < 8 unless allow_degenerate is set.
  explicit Frame(const BasisSet& bases, bool allow_degenerate = false);

  const BasisSet& bases() const { return bases_; }
  const std::array<Matrix3c, kNumOutcomes>& lambdas() const { return lambdas_; }
  const Matrix12& frame_matrix() const { return m_; }
  const Matrix12& pinv() const { return pinv_; }
  int rank() const { return rank_; }

  // rho = I/3 + sum_i (p_i - 1/3) D_i with D_i = sum_k pinv(k, i) Lambda_k.
  const std::array<Matrix3c, kNumOutcomes>& directions() const { return directions_; }

 private:
  BasisSet bases_;
  std::array<Matrix3c, kNumOutcomes> lambdas_;
  std::array<Matrix3c, kNumOutcomes> directions_;
  Matrix12 m_;
  Matrix12 pinv_;
  int rank_ = 0;
};

Frame build_frame(const BasisSet& bases);
const Frame& canonical_frame();

SimplexPoint born_probabilities(const DensityMatrix& rho, const OrthonormalBasis& basis);
SimplexPoint born_probabilities(const Matrix3c& rho, const OrthonormalBasis& basis);
Vector12 born_probabilities(const DensityMatrix& rho, const Frame& frame);

// Linear inversion; positivity is not enforced. Throws InconsistentProbabilities
// when a basis triple does not sum to one within 1e-6.
Matrix3c reconstruct(const Frame& frame, const Vector12& all_probs);
DensityMatrix reconstruct(const Vector12& all_probs);

struct MeasuredProbabilities {
  int basis_index = 0;
  SimplexPoint probs = SimplexPoint::Constant(1.0 / 3.0);
};

// Measured data plus the frame it refers to. The remaining (unmeasured)
// slots span the optimisation coordinates: 3 probabilities per slot, or
// 2 reduced coordinates per slot in the plane of each simplex.
class PriorData {
 public:
  PriorData(const BasisSet& bases, std::vector<MeasuredProbabilities> measured,
            bool allow_degenerate = false);

  // Exact Born data of rho on every slot not listed in `unmeasured`.
  static PriorData from_state(const DensityMatrix& rho, std::vector<int> unmeasured,
                              const BasisSet& bases = qutrit_mub());

  const Frame& frame() const { return *frame_; }
  const std::vector<MeasuredProbabilities>& measured() const { return measured_; }
  const std::vector<int>& unmeasured() const { return unmeasured_; }
  int num_unmeasured() const { return static_cast<int>(unmeasured_.size()); }
  int dim() const { return 3 * num_unmeasured(); }
  int reduced_dim() const { return 2 * num_unmeasured(); }

  // Same measured data, unmeasured slots replaced in order by `future`.
  PriorData with_future(std::span<const OrthonormalBasis> future,
                        bool allow_degenerate = false) const;

  Matrix3c rho(const Eigen::VectorXd& p) const;
  Matrix3c rho_reduced(const Eigen::VectorXd& u) const;

  Eigen::VectorXd lift(const Eigen::VectorXd& u) const;
  Eigen::VectorXd reduce(const Eigen::VectorXd& p) const;
  Eigen::VectorXd center() const;  // uniform probabilities
  // Born probabilities of rho on the unmeasured slots.
  Eigen::VectorXd coordinates_of(const Matrix3c& rho) const;

  // d rho / d p_i and d rho / d u_j.
  const std::vector<Matrix3c>& prob_directions() const { return prob_dirs_; }
  const std::vector<Matrix3c>& reduced_directions() const { return reduced_dirs_; }
  // p = center + lift_matrix * u
  const Eigen::MatrixXd& lift_matrix() const { return lift_; }

 private:
  std::shared_ptr<const Frame> frame_;
  std::vector<MeasuredProbabilities> measured_;
  std::vector<int> unmeasured_;
  Matrix3c offset_;      // rho(p) = offset_ + sum_i p_i prob_dirs_[i]
  Matrix3c center_rho_;  // rho at the uniform point
  std::vector<Matrix3c> prob_dirs_;
  std::vector<Matrix3c> reduced_dirs_;
  Eigen::MatrixXd lift_;
};

// Orthonormal in-plane directions of the probability simplex.
const Eigen::Matrix<double, 3, 2>& simplex_plane_basis();

// Candidate state for the given unmeasured probabilities (3 per unmeasured
// slot, in slot order); assembled through the full 12-vector reconstruction.
Matrix3c rho_of_unmeasured(const Eigen::VectorXd& p, const PriorData& prior);

// f = V q + beta between the prior's unmeasured probabilities f and the
// probabilities q of alternative future bases.
struct AffineMap {
  Eigen::MatrixXd v;
  Eigen::VectorXd beta;
  double jacobian = 0.0;  // |det V|
  bool degenerate = false;

  Eigen::VectorXd apply(const Eigen::VectorXd& q) const { return v * q + beta; }
};

inline constexpr double kDegenerateJacobian = 1e-10;

AffineMap future_transform(const PriorData& prior, std::span<const OrthonormalBasis> future);

}  // namespace qtomo
