// Copyright 2026 The qmem Authors
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

#include <Eigen/Dense>
#include <random>

#include "qmem/state.hpp"

namespace qmem::testing {

using Rng = std::mt19937_64;

inline Matrix ginibre(Eigen::Index n, Rng &rng) {
  std::normal_distribution<double> g;
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = Complex(g(rng), g(rng));
  }
  return m;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
inline Matrix random_unitary(Eigen::Index n, Rng &rng) {
  Eigen::HouseholderQR<Matrix> qr(ginibre(n, rng));
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Complex d = r(j, j);
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

inline Matrix random_special_unitary(Eigen::Index n, Rng &rng) {
  Matrix u = random_unitary(n, rng);
  const Complex det = u.determinant();
  return u * std::polar(1.0, -std::arg(det) / static_cast<double>(n));
}

inline Vector random_ket(Eigen::Index n, Rng &rng) {
  std::normal_distribution<double> g;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(g(rng), g(rng));
  return v / v.norm();
}

/// Full-rank mixed state G G† / tr(G G†).
inline Matrix random_mixed(Eigen::Index n, Rng &rng) {
  const Matrix g = ginibre(n, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

/// Basis (g1, g2, e1, e2).
inline Matrix memory_u() {
  Matrix u(4, 4);
  u << -1, 0, 0, 0,
        0, 0, -1, 0,
        0, 1, 0, 0,
        0, 0, 0, -1;
  return u;
}

inline Matrix factor_v1() {
  Matrix v(4, 4);
  v << 1, 0, 0, 0,
       0, 0, 0, 1,
       0, 0, 1, 0,
       0, -1, 0, 0;
  return v;
}

inline Matrix factor_v2() {
  Matrix v(4, 4);
  v << 0, 0, 0, 1,
       0, 1, 0, 0,
       0, 0, 1, 0,
      -1, 0, 0, 0;
  return v;
}

inline Matrix factor_v3() {
  Matrix v(4, 4);
  v << 0, 0, 1, 0,
       0, 1, 0, 0,
      -1, 0, 0, 0,
       0, 0, 0, 1;
  return v;
}

/// ρ with ρ_{g1g1} = 0.2, ρ_{e1e1} = 0.8, ρ_{g1e1} = 0.4.
inline Matrix rho_optical() {
  Matrix r = Matrix::Zero(4, 4);
  r(0, 0) = 0.2;
  r(2, 2) = 0.8;
  r(0, 2) = 0.4;
  r(2, 0) = 0.4;
  return r;
}

/// ρ′ with ρ′_{g1g1} = 0.2, ρ′_{g2g2} = 0.8, ρ′_{g1g2} = 0.4.
inline Matrix rho_stored() {
  Matrix r = Matrix::Zero(4, 4);
  r(0, 0) = 0.2;
  r(1, 1) = 0.8;
  r(0, 1) = 0.4;
  r(1, 0) = 0.4;
  return r;
}

}  // namespace qmem::testing
