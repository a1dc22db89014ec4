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
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>

#include "qmem/errors.hpp"

namespace qmem {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

/// Acceptance thresholds applied when a state is constructed.
struct StateTolerance {
  double hermiticity = 1e-12;
  double trace = 1e-12;
  double eigenvalue_floor = -1e-10;
};

/// Thresholds used for states produced by the integrators.
inline constexpr StateTolerance kIntegratedTolerance{1e-9, 1e-8, -1e-7};

inline double max_abs(const Matrix &m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

inline double hermiticity_defect(const Matrix &m) {
  return max_abs(m - m.adjoint());
}

inline double trace_error(const Matrix &m) {
  return std::abs(m.trace() - Complex(1.0, 0.0));
}

/// Smallest eigenvalue of the Hermitian part of `m`.
inline double min_eigenvalue(const Matrix &m) {
  Matrix h = 0.5 * (m + m.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline double purity(const Matrix &m) { return (m * m).trace().real(); }

/// Hermitian, unit-trace, positive-semidefinite state of a `dim`-level system.
///
/// Basis index i refers to the i-th level of the owning LevelSystem; the
/// four-level system uses (g1, g2, e1, e2).
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix entries, StateTolerance tol = {})
      : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
      throw DimensionMismatch("density matrix must be square and non-empty");
    }
    if (!entries_.allFinite()) {
      throw InvalidState("density matrix has non-finite entries");
    }
    const double herm = hermiticity_defect(entries_);
    if (herm > tol.hermiticity) {
      throw InvalidState("density matrix is not Hermitian (defect " +
                         std::to_string(herm) + ")");
    }
    const double terr = trace_error(entries_);
    if (terr > tol.trace) {
      throw InvalidState("density matrix trace differs from 1 by " +
                         std::to_string(terr));
    }
    const double lmin = min_eigenvalue(entries_);
    if (lmin < tol.eigenvalue_floor) {
      throw InvalidState("density matrix has negative eigenvalue " +
                         std::to_string(lmin));
    }
  }

  static DensityMatrix basis(Eigen::Index dim, Eigen::Index k) {
    Matrix m = Matrix::Zero(dim, dim);
    m(k, k) = 1.0;
    return DensityMatrix(std::move(m));
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix &matrix() const { return entries_; }
  Complex operator()(Eigen::Index i, Eigen::Index j) const {
    return entries_(i, j);
  }
  double population(Eigen::Index i) const { return entries_(i, i).real(); }
  double purity() const { return qmem::purity(entries_); }

 private:
  Matrix entries_;
};

class PureState {
 public:
  explicit PureState(Vector amplitudes) : amplitudes_(std::move(amplitudes)) {
    if (amplitudes_.size() == 0) {
      throw DimensionMismatch("pure state must have at least one amplitude");
    }
    const double n2 = amplitudes_.squaredNorm();
    if (!std::isfinite(n2) || std::abs(n2 - 1.0) > 1e-12) {
      std::ostringstream os;
      os << "pure state is not normalized (squared norm " << n2 << ")";
      throw NormalizationError(os.str());
    }
  }

  /// Rescales `amplitudes` to unit norm first.
  static PureState normalized(const Vector &amplitudes) {
    const double n = amplitudes.norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
      throw NormalizationError("cannot normalize a zero or non-finite vector");
    }
    return PureState(amplitudes / n);
  }

  Eigen::Index dim() const { return amplitudes_.size(); }
  const Vector &amplitudes() const { return amplitudes_; }

 private:
  Vector amplitudes_;
};

class UnitaryOperator {
 public:
  explicit UnitaryOperator(Matrix entries, double tol = 1e-12)
      : entries_(std::move(entries)) {
    if (entries_.rows() == 0 || entries_.rows() != entries_.cols()) {
      throw DimensionMismatch("unitary must be square and non-empty");
    }
    const auto n = entries_.rows();
    const double defect =
        max_abs(entries_ * entries_.adjoint() - Matrix::Identity(n, n));
    if (!(defect <= tol)) {
      throw InvalidState("matrix is not unitary (defect " +
                         std::to_string(defect) + ")");
    }
  }

  static UnitaryOperator identity(Eigen::Index dim) {
    return UnitaryOperator(Matrix::Identity(dim, dim));
  }

  Eigen::Index dim() const { return entries_.rows(); }
  const Matrix &matrix() const { return entries_; }
  UnitaryOperator adjoint() const {
    return UnitaryOperator(entries_.adjoint(), 1e-10);
  }

 private:
  Matrix entries_;
};

inline DensityMatrix density_from_pure(const PureState &psi) {
  const Vector &a = psi.amplitudes();
  return DensityMatrix(a * a.adjoint());
}

/// U·rho·U†.
inline DensityMatrix apply_unitary(const DensityMatrix &rho,
                                   const UnitaryOperator &u) {
  if (rho.dim() != u.dim()) {
    throw DimensionMismatch("apply_unitary: state has dimension " +
                            std::to_string(rho.dim()) + ", operator " +
                            std::to_string(u.dim()));
  }
  Matrix out = u.matrix() * rho.matrix() * u.matrix().adjoint();
  // Conjugation is exact up to rounding; restore exact Hermiticity.
  out = 0.5 * (out + out.adjoint()).eval();
  return DensityMatrix(std::move(out));
}

namespace detail {

// Eigenvalues below this are rounding noise; their square roots would
// otherwise contribute O(1e-8) to the fidelity.
inline constexpr double kSpectralFloor = 1e-13;

inline Matrix psd_sqrt(const Matrix &m) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(0.5 * (m + m.adjoint()));
  Eigen::VectorXd roots = solver.eigenvalues().unaryExpr(
      [](double l) { return l > kSpectralFloor ? std::sqrt(l) : 0.0; });
  return solver.eigenvectors() * roots.cast<Complex>().asDiagonal() *
         solver.eigenvectors().adjoint();
}

}  // namespace detail

/// Uhlmann fidelity (tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clamped to [0,1].
///
/// When either argument is pure this reduces to tr(rho sigma), which is used
/// directly so the result is exactly symmetric.
inline double fidelity(const DensityMatrix &rho, const DensityMatrix &sigma) {
  if (rho.dim() != sigma.dim()) {
    throw DimensionMismatch("fidelity: dimensions " + std::to_string(rho.dim()) +
                            " and " + std::to_string(sigma.dim()));
  }
  double f;
  if (std::abs(rho.purity() - 1.0) < 1e-12 ||
      std::abs(sigma.purity() - 1.0) < 1e-12) {
    f = (rho.matrix() * sigma.matrix()).trace().real();
  } else {
    const Matrix s = detail::psd_sqrt(rho.matrix());
    const Matrix inner = s * sigma.matrix() * s;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(
        0.5 * (inner + inner.adjoint()), Eigen::EigenvaluesOnly);
    double tr = 0.0;
    for (double l : solver.eigenvalues()) {
      if (l > detail::kSpectralFloor) tr += std::sqrt(l);
    }
    f = tr * tr;
  }
  return std::clamp(f, 0.0, 1.0);
}

}  // namespace qmem
