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

#include <gtest/gtest.h>

#include "qmem/state.hpp"
#include "support.hpp"

namespace qmem {
namespace {

using testing::Rng;

TEST(DensityFromPure, Superposition) {
  Vector a(4);
  a << 1, 0, 2, 0;
  const auto rho = density_from_pure(PureState(a / std::sqrt(5.0)));
  EXPECT_NEAR(rho(0, 0).real(), 0.2, 1e-15);
  EXPECT_NEAR(rho(2, 2).real(), 0.8, 1e-15);
  EXPECT_NEAR(rho(0, 2).real(), 0.4, 1e-15);
  EXPECT_NEAR(max_abs(rho.matrix() - testing::rho_optical()), 0.0, 1e-15);
}

TEST(DensityFromPure, BasisProjector) {
  Vector a = Vector::Zero(4);
  a(0) = 1.0;
  const auto rho = density_from_pure(PureState(a));
  Matrix expected = Matrix::Zero(4, 4);
  expected(0, 0) = 1.0;
  EXPECT_EQ(max_abs(rho.matrix() - expected), 0.0);
}

TEST(DensityFromPure, ComplexQubit) {
  Vector a(2);
  a << 1.0, Complex(0.0, 1.0);
  const auto rho = density_from_pure(PureState(a / std::sqrt(2.0)));
  EXPECT_NEAR(std::abs(rho(0, 1) - Complex(0.0, -0.5)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(rho(1, 0) - Complex(0.0, 0.5)), 0.0, 1e-15);
  EXPECT_NEAR(rho(0, 0).real(), 0.5, 1e-15);
  EXPECT_NEAR(rho(1, 1).real(), 0.5, 1e-15);
}

TEST(DensityFromPure, RejectsUnnormalized) {
  Vector a(2);
  a << 1.0, 1.0;
  EXPECT_THROW(PureState{a}, NormalizationError);
}

TEST(DensityFromPure, PurityIsOne) {
  Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const auto rho = density_from_pure(PureState(testing::random_ket(4, rng)));
    EXPECT_NEAR(rho.purity(), 1.0, 1e-10);
  }
}

TEST(DensityMatrix, RejectsInvalid) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = 0.5;
  EXPECT_THROW(DensityMatrix{m}, InvalidState);  // trace
  m(1, 1) = 0.5;
  m(0, 1) = 0.1;
  EXPECT_THROW(DensityMatrix{m}, InvalidState);  // not Hermitian
  m(1, 0) = 0.1;
  EXPECT_NO_THROW(DensityMatrix{m});
  Matrix neg = Matrix::Zero(2, 2);
  neg(0, 0) = 1.5;
  neg(1, 1) = -0.5;
  EXPECT_THROW(DensityMatrix{neg}, InvalidState);  // PSD
  EXPECT_THROW(DensityMatrix{Matrix::Zero(2, 3)}, DimensionMismatch);
}

TEST(UnitaryOperator, RejectsNonUnitary) {
  Matrix m = Matrix::Identity(3, 3);
  m(0, 1) = 1e-6;
  EXPECT_THROW(UnitaryOperator{m}, InvalidState);
}

TEST(ApplyUnitary, MemoryMap) {
  const auto out = apply_unitary(DensityMatrix(testing::rho_optical()),
                                 UnitaryOperator(testing::memory_u()));
  EXPECT_LE(max_abs(out.matrix() - testing::rho_stored()), 1e-12);
}

TEST(ApplyUnitary, IdentityLeavesStateUnchanged) {
  Rng rng(3);
  const DensityMatrix rho(testing::random_mixed(4, rng));
  const auto out = apply_unitary(rho, UnitaryOperator::identity(4));
  EXPECT_LE(max_abs(out.matrix() - rho.matrix()), 1e-15);
}

TEST(ApplyUnitary, DimensionMismatch) {
  EXPECT_THROW(apply_unitary(DensityMatrix::basis(3, 0),
                             UnitaryOperator::identity(4)),
               DimensionMismatch);
}

TEST(ApplyUnitary, PreservesTracePuritySpectrum) {
  Rng rng(2024);
  for (int k = 0; k < 200; ++k) {
    const DensityMatrix rho(testing::random_mixed(4, rng));
    const UnitaryOperator u(testing::random_unitary(4, rng));
    const auto out = apply_unitary(rho, u);
    EXPECT_NEAR(out.matrix().trace().real(), 1.0, 1e-12);
    EXPECT_NEAR(out.purity(), rho.purity(), 1e-10);
    // Independent route: compare sorted spectra.
    Eigen::SelfAdjointEigenSolver<Matrix> before(rho.matrix());
    Eigen::SelfAdjointEigenSolver<Matrix> after(out.matrix());
    EXPECT_LE((before.eigenvalues() - after.eigenvalues()).cwiseAbs().maxCoeff(),
              1e-10);
  }
}

TEST(Fidelity, Examples) {
  Rng rng(5);
  const DensityMatrix mixed(testing::random_mixed(4, rng));
  EXPECT_NEAR(fidelity(mixed, mixed), 1.0, 1e-12);
  EXPECT_EQ(fidelity(DensityMatrix::basis(4, 0), DensityMatrix::basis(4, 1)),
            0.0);
  EXPECT_NEAR(fidelity(DensityMatrix(testing::rho_optical()),
                       DensityMatrix::basis(4, 0)),
              0.2, 1e-15);
  EXPECT_THROW(fidelity(mixed, DensityMatrix::basis(3, 0)), DimensionMismatch);
}

TEST(Fidelity, PureStatesMatchOverlap) {
  Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const Vector a = testing::random_ket(4, rng);
    const Vector b = testing::random_ket(4, rng);
    const double overlap = std::norm(a.dot(b));
    EXPECT_NEAR(fidelity(density_from_pure(PureState(a)),
                         density_from_pure(PureState(b))),
                overlap, 1e-12);
  }
}

TEST(Fidelity, SymmetricAndOneOnlyForEqualStates) {
  Rng rng(99);
  for (int k = 0; k < 200; ++k) {
    const bool pure_a = k % 3 == 0;
    const bool pure_b = k % 5 == 0;
    const DensityMatrix a =
        pure_a ? density_from_pure(PureState(testing::random_ket(4, rng)))
               : DensityMatrix(testing::random_mixed(4, rng));
    const DensityMatrix b =
        pure_b ? density_from_pure(PureState(testing::random_ket(4, rng)))
               : DensityMatrix(testing::random_mixed(4, rng));
    const double fab = fidelity(a, b);
    EXPECT_NEAR(fab, fidelity(b, a), 1e-12);
    EXPECT_GE(fab, 0.0);
    EXPECT_LT(fab, 1.0 - 1e-8);
    EXPECT_NEAR(fidelity(a, a), 1.0, 1e-8);
  }
}

}  // namespace
}  // namespace qmem
