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

#include <span>

#include <Eigen/Dense>

namespace qtomo {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Vector3c = Eigen::Vector3cd;

// Probability triple for one measurement basis.
using SimplexPoint = Eigen::Vector3d;

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kPsdTol = 1e-10;

// Ascending eigenvalues with matching orthonormal eigenvector columns.
struct EigenSystem {
  Eigen::Vector3d values;
  Matrix3c vectors;
};

struct MinEigen {
  double value;
  Vector3c vector;
};

// A 3x3 Hermitian, unit-trace, positive semidefinite matrix.
class DensityMatrix {
 public:
  DensityMatrix();  // maximally mixed state

  // Throws Error unless the invariants hold within tolerance.
  explicit DensityMatrix(const Matrix3c& m);

  // Skips validation; for candidates whose positivity is tested separately.
  static DensityMatrix unchecked(const Matrix3c& m);

  static DensityMatrix maximally_mixed();
  static DensityMatrix pure(const Vector3c& ket);
  static DensityMatrix diagonal(double a, double b, double c);

  const Matrix3c& matrix() const { return m_; }
  Complex operator()(int i, int j) const { return m_(i, j); }

 private:
  struct NoCheck {};
  DensityMatrix(const Matrix3c& m, NoCheck) : m_(m) {}
  Matrix3c m_;
};

bool is_hermitian(const Matrix3c& h, double tol = kHermitianTol);

EigenSystem eig_hermitian(const Matrix3c& h);
MinEigen min_eigen(const Matrix3c& h);

// True iff h + tol*I has a Cholesky factorisation with positive pivots.
bool is_psd_cholesky(const Matrix3c& h, double tol = kPsdTol);

// -sum x ln x with 0 ln 0 = 0; entries are not validated.
double entropy_of(std::span<const double> values);

double von_neumann_entropy(const DensityMatrix& rho);
double shannon_entropy(const SimplexPoint& probs);

double purity(const DensityMatrix& rho);
double determinant(const Matrix3c& h);

}  // namespace qtomo
