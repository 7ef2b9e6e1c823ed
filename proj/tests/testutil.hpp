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

#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include <Eigen/Dense>

#include "qtomo/linalg.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/rng.hpp"

namespace testutil {

inline qtomo::Vector3c ket(int k) {
  qtomo::Vector3c v = qtomo::Vector3c::Zero();
  v(k) = 1.0;
  return v;
}

inline qtomo::DensityMatrix basis_state(int k) { return qtomo::DensityMatrix::pure(ket(k)); }

inline qtomo::DensityMatrix mixed() { return qtomo::DensityMatrix::maximally_mixed(); }

inline double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

inline qtomo::Matrix3c random_hermitian(qtomo::Rng& rng) {
  qtomo::Matrix3c a;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = {rng.normal(), rng.normal()};
  return 0.5 * (a + a.adjoint());
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

// One-sample Kolmogorov-Smirnov statistic against a continuous CDF.
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, (i + 1) / n - f, f - i / n});
  }
  return d;
}

inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  return d;
}

// 95% critical values.
inline double ks_critical(std::size_t n) { return 1.358 / std::sqrt(static_cast<double>(n)); }
inline double ks_critical(std::size_t n, std::size_t m) {
  return 1.358 * std::sqrt(static_cast<double>(n + m) / (static_cast<double>(n) * m));
}

}  // namespace testutil
