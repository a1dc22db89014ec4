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

#include <cmath>
#include <span>
#include <string>

#include "qmem/state.hpp"
#include "qmem/system.hpp"

namespace qmem {

/// Wraps an angle into (−π, π].
inline double wrap_phase(double phi) {
  double w = std::remainder(phi, 2.0 * kPi);
  return w <= -kPi ? w + 2.0 * kPi : w;
}

/// exp[(θ/2)(e^{iφ}|a⟩⟨b| − e^{−iφ}|b⟩⟨a|)] on the edge (a, b).
struct PlanarRotation {
  Edge edge;
  double angle = 0.0;
  double phase = 0.0;
};

inline PlanarRotation inverse(const PlanarRotation &r) {
  return {r.edge, r.angle, wrap_phase(r.phase + kPi)};
}

/// Same operator expressed on the swapped orientation (b, a).
inline PlanarRotation flipped(const PlanarRotation &r) {
  return {Edge{r.edge.b, r.edge.a}, r.angle, wrap_phase(kPi - r.phase)};
}

/// Re-expresses `r` with the orientation of `target` (which must be the same
/// pair).
inline PlanarRotation oriented_as(const PlanarRotation &r, const Edge &target) {
  return (r.edge.a == target.a && r.edge.b == target.b) ? r : flipped(r);
}

inline Matrix rotation_matrix(const PlanarRotation &r, Eigen::Index dim) {
  const auto a = static_cast<Eigen::Index>(r.edge.a);
  const auto b = static_cast<Eigen::Index>(r.edge.b);
  if (a >= dim || b >= dim || a == b) {
    throw DimensionMismatch("rotation edge (" + std::to_string(a) + ", " +
                            std::to_string(b) + ") outside a " +
                            std::to_string(dim) + "-level basis");
  }
  const double c = std::cos(0.5 * r.angle);
  const double s = std::sin(0.5 * r.angle);
  const Complex e = std::polar(1.0, r.phase);
  Matrix m = Matrix::Identity(dim, dim);
  m(a, a) = c;
  m(b, b) = c;
  m(a, b) = s * e;
  m(b, a) = -s * std::conj(e);
  return m;
}

inline Matrix rotation_matrix(const PlanarRotation &r,
                              const LevelSystem &system) {
  return rotation_matrix(r, static_cast<Eigen::Index>(system.dim()));
}

/// Left-to-right product R(r_0)·R(r_1)···R(r_{k−1}): the last element acts on
/// a state first. Empty input gives the identity.
inline Matrix sequence_product(std::span<const PlanarRotation> rotations,
                               Eigen::Index dim) {
  Matrix out = Matrix::Identity(dim, dim);
  for (const auto &r : rotations) out = out * rotation_matrix(r, dim);
  return out;
}

}  // namespace qmem
