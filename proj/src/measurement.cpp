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

#include "qtomo/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qtomo/error.hpp"

namespace qtomo {

namespace {

constexpr double kInputSumTol = 1e-6;

void check_triple(const SimplexPoint& p, const char* what) {
  if (std::abs(p.sum() - 1.0) > kInputSumTol || (p.array() < -kInputSumTol).any()) {
    throw InconsistentProbabilities(std::string(what) + ": probabilities must be a simplex point");
  }
}

}  // namespace

OrthonormalBasis::OrthonormalBasis(const Matrix3c& kets) : kets_(kets) {
  if ((kets.adjoint() * kets - Matrix3c::Identity()).cwiseAbs().maxCoeff() > 1e-10) {
    throw Error("basis kets are not orthonormal");
  }
}

const BasisSet& qutrit_mub() {
  static const BasisSet mub = [] {
    const Complex w = std::polar(1.0, -2.0 * std::numbers::pi / 3.0);
    const Complex w2 = w * w;
    const double s = 1.0 / std::sqrt(3.0);
    Matrix3c fourier, third, fourth;
    fourier << 1, 1, 1, 1, w, w2, 1, w2, w;
    third << 1, 1, 1, w, w2, 1, w, 1, w2;
    fourth << 1, 1, 1, w2, w, 1, w2, 1, w;
    return BasisSet{OrthonormalBasis(Matrix3c::Identity()), OrthonormalBasis(s * fourier),
                    OrthonormalBasis(s * third), OrthonormalBasis(s * fourth)};
  }();
  return mub;
}

bool check_unbiased(const OrthonormalBasis& a, const OrthonormalBasis& b, double tol) {
  const Matrix3c overlaps = a.kets().adjoint() * b.kets();
  return ((overlaps.cwiseAbs2().array() - 1.0 / 3.0).abs() <= tol).all();
}

Frame::Frame(const BasisSet& bases, bool allow_degenerate) : bases_(bases) {
  for (int j = 0; j < kNumBases; ++j) {
    for (int k = 0; k < 3; ++k) {
      lambdas_[3 * j + k] = bases[j].projector(k) - Matrix3c::Identity() / 3.0;
    }
  }
  for (int a = 0; a < kNumOutcomes; ++a) {
    for (int b = a; b < kNumOutcomes; ++b) {
      const double v = (lambdas_[a] * lambdas_[b]).trace().real();
      m_(a, b) = v;
      m_(b, a) = v;
    }
  }
  Eigen::JacobiSVD<Matrix12> svd(m_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-10 * sv(0);
  Eigen::Matrix<double, kNumOutcomes, 1> inv = Eigen::Matrix<double, kNumOutcomes, 1>::Zero();
  for (int i = 0; i < kNumOutcomes; ++i) {
    if (sv(i) > cutoff) {
      inv(i) = 1.0 / sv(i);
      ++rank_;
    }
  }
  pinv_ = svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
  if (rank_ < 8 && !allow_degenerate) {
    throw DegenerateFrame("frame matrix has rank " + std::to_string(rank_) + " < 8");
  }
  for (int i = 0; i < kNumOutcomes; ++i) {
    Matrix3c d = Matrix3c::Zero();
    for (int k = 0; k < kNumOutcomes; ++k) d += pinv_(k, i) * lambdas_[k];
    directions_[i] = d;
  }
}

Frame build_frame(const BasisSet& bases) { return Frame(bases); }

const Frame& canonical_frame() {
  static const Frame frame(qutrit_mub());
  return frame;
}

SimplexPoint born_probabilities(const Matrix3c& rho, const OrthonormalBasis& basis) {
  SimplexPoint p;
  for (int k = 0; k < 3; ++k) {
    const Vector3c e = basis.ket(k);
    p(k) = e.dot(rho * e).real();  // Eigen's dot conjugates the left operand
  }
  return p;
}

SimplexPoint born_probabilities(const DensityMatrix& rho, const OrthonormalBasis& basis) {
  return born_probabilities(rho.matrix(), basis);
}

Vector12 born_probabilities(const DensityMatrix& rho, const Frame& frame) {
  Vector12 p;
  for (int j = 0; j < kNumBases; ++j) p.segment<3>(3 * j) = born_probabilities(rho, frame.bases()[j]);
  return p;
}

Matrix3c reconstruct(const Frame& frame, const Vector12& all_probs) {
  for (int j = 0; j < kNumBases; ++j) {
    check_triple(all_probs.segment<3>(3 * j), "reconstruct");
  }
  const Vector12 c = frame.pinv() * (all_probs.array() - 1.0 / 3.0).matrix();
  Matrix3c rho = Matrix3c::Identity() / 3.0;
  for (int k = 0; k < kNumOutcomes; ++k) rho += c(k) * frame.lambdas()[k];
  return rho;
}

DensityMatrix reconstruct(const Vector12& all_probs) {
  return DensityMatrix::unchecked(reconstruct(canonical_frame(), all_probs));
}

const Eigen::Matrix<double, 3, 2>& simplex_plane_basis() {
  static const Eigen::Matrix<double, 3, 2> basis = [] {
    Eigen::Matrix<double, 3, 2> b;
    b.col(0) = Eigen::Vector3d(1.0, -1.0, 0.0) / std::sqrt(2.0);
    b.col(1) = Eigen::Vector3d(1.0, 1.0, -2.0) / std::sqrt(6.0);
    return b;
  }();
  return basis;
}

PriorData::PriorData(const BasisSet& bases, std::vector<MeasuredProbabilities> measured,
                     bool allow_degenerate)
    : frame_(std::make_shared<const Frame>(bases, allow_degenerate)), measured_(std::move(measured)) {
  std::array<bool, kNumBases> seen{};
  for (const auto& m : measured_) {
    if (m.basis_index < 0 || m.basis_index >= kNumBases) {
      throw InconsistentProbabilities("measured basis index out of range");
    }
    if (seen[m.basis_index]) throw InconsistentProbabilities("basis measured twice");
    seen[m.basis_index] = true;
    check_triple(m.probs, "prior data");
  }
  for (int j = 0; j < kNumBases; ++j) {
    if (!seen[j]) unmeasured_.push_back(j);
  }
  if (unmeasured_.empty() || unmeasured_.size() > 2) {
    throw InconsistentProbabilities("prior data must leave one or two bases unmeasured");
  }

  const auto& dirs = frame_->directions();
  offset_ = Matrix3c::Identity() / 3.0;
  for (const auto& m : measured_) {
    for (int k = 0; k < 3; ++k) offset_ += (m.probs(k) - 1.0 / 3.0) * dirs[3 * m.basis_index + k];
  }
  for (int slot : unmeasured_) {
    for (int k = 0; k < 3; ++k) {
      offset_ -= dirs[3 * slot + k] / 3.0;
      prob_dirs_.push_back(dirs[3 * slot + k]);
    }
  }

  const int m = num_unmeasured();
  lift_ = Eigen::MatrixXd::Zero(3 * m, 2 * m);
  for (int b = 0; b < m; ++b) lift_.block<3, 2>(3 * b, 2 * b) = simplex_plane_basis();
  for (int j = 0; j < 2 * m; ++j) {
    Matrix3c g = Matrix3c::Zero();
    for (int i = 0; i < 3 * m; ++i) g += lift_(i, j) * prob_dirs_[i];
    reduced_dirs_.push_back(g);
  }
  center_rho_ = rho(center());
}

PriorData PriorData::from_state(const DensityMatrix& rho, std::vector<int> unmeasured,
                                const BasisSet& bases) {
  std::vector<MeasuredProbabilities> measured;
  for (int j = 0; j < kNumBases; ++j) {
    if (std::find(unmeasured.begin(), unmeasured.end(), j) != unmeasured.end()) continue;
    measured.push_back({j, born_probabilities(rho, bases[j])});
  }
  return PriorData(bases, std::move(measured));
}

PriorData PriorData::with_future(std::span<const OrthonormalBasis> future,
                                 bool allow_degenerate) const {
  if (static_cast<int>(future.size()) != num_unmeasured()) {
    throw Error("with_future: expected one basis per unmeasured slot");
  }
  BasisSet bases = frame_->bases();
  for (std::size_t i = 0; i < future.size(); ++i) bases[unmeasured_[i]] = future[i];
  return PriorData(bases, measured_, allow_degenerate);
}

Matrix3c PriorData::rho(const Eigen::VectorXd& p) const {
  Matrix3c r = offset_;
  for (int i = 0; i < dim(); ++i) r += p(i) * prob_dirs_[i];
  return r;
}

Matrix3c PriorData::rho_reduced(const Eigen::VectorXd& u) const {
  Matrix3c r = center_rho_;
  for (int j = 0; j < reduced_dim(); ++j) r += u(j) * reduced_dirs_[j];
  return r;
}

Eigen::VectorXd PriorData::lift(const Eigen::VectorXd& u) const { return center() + lift_ * u; }

Eigen::VectorXd PriorData::reduce(const Eigen::VectorXd& p) const {
  // lift_ has orthonormal columns.
  return lift_.transpose() * (p - center());
}

Eigen::VectorXd PriorData::center() const { return Eigen::VectorXd::Constant(dim(), 1.0 / 3.0); }

Eigen::VectorXd PriorData::coordinates_of(const Matrix3c& rho) const {
  Eigen::VectorXd p(dim());
  for (int b = 0; b < num_unmeasured(); ++b) {
    p.segment<3>(3 * b) = born_probabilities(rho, frame_->bases()[unmeasured_[b]]);
  }
  return p;
}

Matrix3c rho_of_unmeasured(const Eigen::VectorXd& p, const PriorData& prior) {
  if (p.size() != prior.dim()) throw Error("rho_of_unmeasured: wrong number of probabilities");
  Vector12 all;
  for (const auto& m : prior.measured()) all.segment<3>(3 * m.basis_index) = m.probs;
  for (int b = 0; b < prior.num_unmeasured(); ++b) {
    all.segment<3>(3 * prior.unmeasured()[b]) = p.segment<3>(3 * b);
  }
  return reconstruct(prior.frame(), all);
}

AffineMap future_transform(const PriorData& prior, std::span<const OrthonormalBasis> future) {
  const PriorData alt = prior.with_future(future, /*allow_degenerate=*/true);
  const int n = prior.dim();
  AffineMap map;
  map.v = Eigen::MatrixXd::Zero(n, n);
  map.beta = Eigen::VectorXd::Zero(n);

  // Along each block's (1,1,1) direction the alt frame has no response, so V
  // is completed there by the identity; that keeps |det V| the in-plane
  // area ratio.
  const Matrix3c alt_offset = alt.rho(Eigen::VectorXd::Zero(n));
  for (int b = 0; b < prior.num_unmeasured(); ++b) {
    const OrthonormalBasis& basis = prior.frame().bases()[prior.unmeasured()[b]];
    for (int k = 0; k < 3; ++k) {
      const Vector3c e = basis.ket(k);
      const int row = 3 * b + k;
      for (int i = 0; i < n; ++i) map.v(row, i) = e.dot(alt.prob_directions()[i] * e).real();
      for (int i = 0; i < 3; ++i) map.v(row, 3 * b + i) += 1.0 / 3.0;
      map.beta(row) = e.dot(alt_offset * e).real() - 1.0 / 3.0;
    }
  }
  map.jacobian = std::abs(map.v.determinant());
  map.degenerate = map.jacobian < kDegenerateJacobian;
  return map;
}

}  // namespace qtomo
