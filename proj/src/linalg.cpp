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

#include "qtomo/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "qtomo/error.hpp"

namespace qtomo {

DensityMatrix::DensityMatrix() : m_(Matrix3c::Identity() / 3.0) {}

DensityMatrix::DensityMatrix(const Matrix3c& m) : m_(m) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw Error("density matrix is not Hermitian");
  }
  if (std::abs(m.trace().real() - 1.0) > 1e-12) {
    throw Error("density matrix does not have unit trace");
  }
  if (min_eigen(m).value < -kPsdTol) {
    throw Error("density matrix has a negative eigenvalue");
  }
}

DensityMatrix DensityMatrix::unchecked(const Matrix3c& m) { return {m, NoCheck{}}; }

DensityMatrix DensityMatrix::maximally_mixed() { return {}; }

DensityMatrix DensityMatrix::pure(const Vector3c& ket) {
  const Vector3c k = ket.normalized();
  return {k * k.adjoint(), NoCheck{}};
}

DensityMatrix DensityMatrix::diagonal(double a, double b, double c) {
  Matrix3c m = Matrix3c::Zero();
  m(0, 0) = a;
  m(1, 1) = b;
  m(2, 2) = c;
  return DensityMatrix(m);
}

bool is_hermitian(const Matrix3c& h, double tol) {
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

EigenSystem eig_hermitian(const Matrix3c& h) {
  if (!is_hermitian(h)) throw NonHermitianInput("eig_hermitian: input is not Hermitian");
  // Symmetrise so round-off in the lower triangle cannot leak in.
  const Matrix3c sym = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix3c> solver(sym);
  return {solver.eigenvalues(), solver.eigenvectors()};
}

MinEigen min_eigen(const Matrix3c& h) {
  const EigenSystem es = eig_hermitian(h);
  return {es.values(0), es.vectors.col(0)};
}

bool is_psd_cholesky(const Matrix3c& h, double tol) {
  // Unrolled 3x3 complex Cholesky, h = L L^H; only the lower triangle is read.
  const double d0 = h(0, 0).real() + tol;
  if (!(d0 > 0.0)) return false;
  const double l00 = std::sqrt(d0);
  const Complex l10 = h(1, 0) / l00;
  const Complex l20 = h(2, 0) / l00;
  const double d1 = h(1, 1).real() + tol - std::norm(l10);
  if (!(d1 > 0.0)) return false;
  const double l11 = std::sqrt(d1);
  const Complex l21 = (h(2, 1) - l20 * std::conj(l10)) / l11;
  const double d2 = h(2, 2).real() + tol - std::norm(l20) - std::norm(l21);
  return d2 > 0.0;
}

double entropy_of(std::span<const double> values) {
  double s = 0.0;
  for (double x : values) {
    if (x > 0.0) s -= x * std::log(x);
  }
  return s;
}

double von_neumann_entropy(const DensityMatrix& rho) {
  const EigenSystem es = eig_hermitian(rho.matrix());
  const double s = entropy_of(std::span<const double>(es.values.data(), 3));
  return std::clamp(s, 0.0, std::log(3.0));
}

double shannon_entropy(const SimplexPoint& probs) {
  if ((probs.array() < -1e-12).any() || std::abs(probs.sum() - 1.0) > 1e-9) {
    throw InvalidSimplexPoint("shannon_entropy: not a probability triple");
  }
  return entropy_of(std::span<const double>(probs.data(), 3));
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

double determinant(const Matrix3c& h) { return h.determinant().real(); }

}  // namespace qtomo
