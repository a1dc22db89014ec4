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

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "qmem/compiler.hpp"
#include "qmem/pulse.hpp"
#include "qmem/state.hpp"
#include "qmem/system.hpp"

namespace qmem {

/// Spontaneous decay |from⟩ → |to⟩ with jump operator L = |to⟩⟨from|.
struct DecayChannel {
  std::size_t from = 0;
  std::size_t to = 0;
  double rate = 0.0;
};

/// Every level above the lowest energy decays into every lowest-energy level
/// at the same rate. For the four-level system: e1→g1, e1→g2, e2→g1, e2→g2.
inline std::vector<DecayChannel> default_decay_channels(
    const LevelSystem &system, double rate) {
  std::vector<DecayChannel> out;
  if (system.levels.empty()) return out;
  double floor = system.levels[0].energy;
  for (const auto &l : system.levels) floor = std::min(floor, l.energy);
  for (std::size_t e = 0; e < system.dim(); ++e) {
    if (system.levels[e].energy <= floor) continue;
    for (std::size_t g = 0; g < system.dim(); ++g) {
      if (system.levels[g].energy == floor) out.push_back({e, g, rate});
    }
  }
  return out;
}

inline void check_channels(const std::vector<DecayChannel> &channels,
                           const LevelSystem &system) {
  for (const auto &c : channels) {
    if (c.from >= system.dim() || c.to >= system.dim()) {
      throw IntegrationError("decay channel references an unknown level");
    }
    if (!(c.rate >= 0.0) || !std::isfinite(c.rate)) {
      throw IntegrationError("decay rate must be finite and non-negative");
    }
    if (!(system.levels[c.from].energy > system.levels[c.to].energy)) {
      throw IntegrationError("decay channel " +
                             system.name(Edge{c.from, c.to}) +
                             " does not go downhill in energy");
    }
  }
}

struct StepControl {
  /// Multiplies the default step of either integrator.
  double step_scale = 1.0;
  double min_step = 1e-9;
  std::size_t max_steps = 50'000'000;
  /// Record every n-th step (segment ends are always recorded).
  std::size_t record_stride = 1;
};

struct StateDefects {
  double trace_error = 0.0;
  double hermiticity = 0.0;
  double min_eigenvalue = std::numeric_limits<double>::infinity();
};

/// Sampled states; times are in the schedule's units (1/Ω for the bundled
/// fixtures). Optical coherences are rotating-frame values.
struct Trajectory {
  std::vector<double> times;
  std::vector<Matrix> states;

  std::size_t size() const { return times.size(); }
  const Matrix &final_state() const { return states.back(); }
  double population(std::size_t k, Eigen::Index i) const {
    return states[k](i, i).real();
  }
  Complex coherence(std::size_t k, Eigen::Index i, Eigen::Index j) const {
    return states[k](i, j);
  }

  /// Worst-case invariant defects over every sample.
  StateDefects defects() const {
    StateDefects d;
    for (const auto &s : states) {
      d.trace_error = std::max(d.trace_error, qmem::trace_error(s));
      d.hermiticity = std::max(d.hermiticity, hermiticity_defect(s));
      d.min_eigenvalue = std::min(d.min_eigenvalue, min_eigenvalue(s));
    }
    return d;
  }

  void record(double t, const Matrix &rho) {
    times.push_back(t);
    states.push_back(rho);
  }
};

namespace detail {

struct Segment {
  double begin;
  double end;
  const Pulse *pulse;  // null while undriven
  double dipole;
};

inline std::vector<Segment> segments(const PulseSchedule &schedule,
                                     const LevelSystem &system) {
  check_bound(schedule, system);
  std::vector<Segment> out;
  double cursor = 0.0;
  for (const auto &p : schedule.pulses()) {
    if (p.envelope.begin() > cursor) {
      out.push_back({cursor, p.envelope.begin(), nullptr, 0.0});
    }
    out.push_back({p.envelope.begin(), p.envelope.end(), &p,
                   system.dipole(p.transition)});
    cursor = p.envelope.end();
  }
  if (schedule.end_time() > cursor) {
    out.push_back({cursor, schedule.end_time(), nullptr, 0.0});
  }
  return out;
}

/// Adds (Ω/2)(e^{iφ}|a⟩⟨b| + h.c.) with Ω = 2·d·A(t) to `h`.
inline void add_drive(Matrix &h, const Pulse &p, double dipole,
                      double amplitude) {
  const Complex coupling = dipole * amplitude * std::polar(1.0, p.carrier_phase);
  const auto a = static_cast<Eigen::Index>(p.transition.a);
  const auto b = static_cast<Eigen::Index>(p.transition.b);
  h(a, b) += coupling;
  h(b, a) += std::conj(coupling);
}

/// exp(−i·H·dt) for Hermitian H.
inline Matrix propagator(const Matrix &h, double dt) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  Eigen::VectorXcd phases = (solver.eigenvalues() * (-dt))
                                .unaryExpr([](double x) { return std::polar(1.0, x); })
                                .eval();
  return solver.eigenvectors() * phases.asDiagonal() *
         solver.eigenvectors().adjoint();
}

inline std::size_t step_count(double length, double target_step,
                              const StepControl &control) {
  if (!(control.step_scale > 0.0)) {
    throw IntegrationError("step scale must be positive");
  }
  if (!std::isfinite(target_step)) return 1;
  const auto n = static_cast<std::size_t>(
      std::max(1.0, std::ceil(length / target_step - 1e-9)));
  if (length / static_cast<double>(n) < control.min_step) {
    throw IntegrationError("step size underflow (" +
                           std::to_string(length / static_cast<double>(n)) +
                           ")");
  }
  if (n > control.max_steps) {
    throw IntegrationError("step budget exceeded");
  }
  return n;
}

inline void check_finite(const Matrix &m, double t) {
  if (!m.allFinite()) {
    throw IntegrationError("non-finite state at t = " + std::to_string(t));
  }
}

/// Midpoint-exponential stepping: calls `step(t_end, U_step)` for each step
/// of every driven segment and `idle(t_end)` at the end of undriven ones.
inline void for_each_unitary_step(
    const LevelSystem &system, const PulseSchedule &schedule,
    const StepControl &control,
    const std::function<void(double, const Matrix &, bool)> &step,
    const std::function<void(double)> &idle) {
  const auto n = static_cast<Eigen::Index>(system.dim());
  for (const auto &seg : segments(schedule, system)) {
    if (seg.pulse == nullptr) {
      idle(seg.end);
      continue;
    }
    const double h_target =
        seg.pulse->envelope.shape().width / 200.0 * control.step_scale;
    const std::size_t steps = step_count(seg.end - seg.begin, h_target, control);
    const double h = (seg.end - seg.begin) / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const double mid = seg.begin + (static_cast<double>(k) + 0.5) * h;
      Matrix ham = Matrix::Zero(n, n);
      add_drive(ham, *seg.pulse, seg.dipole, seg.pulse->envelope.profile(mid));
      const bool last = k + 1 == steps;
      step(last ? seg.end : seg.begin + static_cast<double>(k + 1) * h,
           propagator(ham, h), last || (k + 1) % control.record_stride == 0);
    }
  }
}

}  // namespace detail

/// Rotating-frame drive Hamiltonian at time t (units of Ω).
inline Matrix assemble_hamiltonian(const LevelSystem &system,
                                   const PulseSchedule &schedule, double t) {
  check_bound(schedule, system);
  const auto n = static_cast<Eigen::Index>(system.dim());
  Matrix h = Matrix::Zero(n, n);
  int active = 0;
  for (const auto &p : schedule.pulses()) {
    if (t < p.envelope.begin() || t >= p.envelope.end()) continue;
    if (++active > 1) {
      throw InvalidPulse("overlapping pulses at t = " + std::to_string(t));
    }
    detail::add_drive(h, p, system.dipole(p.transition), p.envelope(t));
  }
  return h;
}

/// Coherent evolution dρ/dt = −i[H(t), ρ] by midpoint-exponential steps of
/// width min(σ, T)/200 (times step_scale) within each pulse.
inline Trajectory propagate_unitary(const DensityMatrix &rho0,
                                    const LevelSystem &system,
                                    const PulseSchedule &schedule,
                                    const StepControl &control = {}) {
  if (rho0.dim() != static_cast<Eigen::Index>(system.dim())) {
    throw DimensionMismatch("initial state does not match the level system");
  }
  Trajectory traj;
  Matrix rho = rho0.matrix();
  traj.record(0.0, rho);
  detail::for_each_unitary_step(
      system, schedule, control,
      [&](double t, const Matrix &u, bool keep) {
        rho = u * rho * u.adjoint();
        detail::check_finite(rho, t);
        if (keep) traj.record(t, rho);
      },
      [&](double t) { traj.record(t, rho); });
  return traj;
}

/// Total unitary realized by the time-domain evolution, assembled column by
/// column from the propagated basis kets.
inline Matrix realized_unitary(const LevelSystem &system,
                               const PulseSchedule &schedule,
                               const StepControl &control = {}) {
  const auto n = static_cast<Eigen::Index>(system.dim());
  Matrix kets = Matrix::Identity(n, n);
  detail::for_each_unitary_step(
      system, schedule, control,
      [&](double t, const Matrix &u, bool) {
        kets = u * kets;
        detail::check_finite(kets, t);
      },
      [](double) {});
  return kets;
}

/// Lindblad evolution
///   dρ/dt = −i[H, ρ] + Σ_c Γ_c (L_c ρ L_c† − ½{L_c† L_c, ρ}),  L_c = |g⟩⟨e|,
/// by classical fourth-order Runge–Kutta with step
/// min(0.01/maxΩ, 0.01/maxΓ) · step_scale.
inline Trajectory propagate_lindblad(const DensityMatrix &rho0,
                                     const LevelSystem &system,
                                     const PulseSchedule &schedule,
                                     const std::vector<DecayChannel> &channels,
                                     const StepControl &control = {}) {
  const auto n = static_cast<Eigen::Index>(system.dim());
  if (rho0.dim() != n) {
    throw DimensionMismatch("initial state does not match the level system");
  }
  check_channels(channels, system);

  double max_rabi = 0.0;
  for (const auto &p : schedule.pulses()) {
    max_rabi = std::max(max_rabi,
                        peak_rabi(p.envelope, system.dipole(p.transition)));
  }
  double max_rate = 0.0;
  for (const auto &c : channels) max_rate = std::max(max_rate, c.rate);
  const double h_target =
      0.01 / std::max(max_rabi, max_rate) * control.step_scale;

  auto rhs = [&](const detail::Segment &seg, double t, const Matrix &rho) {
    Matrix out = Matrix::Zero(n, n);
    if (seg.pulse != nullptr) {
      Matrix ham = Matrix::Zero(n, n);
      detail::add_drive(ham, *seg.pulse, seg.dipole,
                        seg.pulse->envelope.profile(t));
      out = Complex(0.0, -1.0) * (ham * rho - rho * ham);
    }
    for (const auto &c : channels) {
      if (c.rate == 0.0) continue;
      const auto e = static_cast<Eigen::Index>(c.from);
      const auto g = static_cast<Eigen::Index>(c.to);
      out(g, g) += c.rate * rho(e, e);
      out.row(e) -= 0.5 * c.rate * rho.row(e);
      out.col(e) -= 0.5 * c.rate * rho.col(e);
    }
    return out;
  };

  Trajectory traj;
  Matrix rho = rho0.matrix();
  traj.record(0.0, rho);
  for (const auto &seg : detail::segments(schedule, system)) {
    const double length = seg.end - seg.begin;
    if (seg.pulse == nullptr && max_rate == 0.0) {
      traj.record(seg.end, rho);
      continue;
    }
    const std::size_t steps = detail::step_count(length, h_target, control);
    const double h = length / static_cast<double>(steps);
    for (std::size_t k = 0; k < steps; ++k) {
      const double t = seg.begin + static_cast<double>(k) * h;
      const Matrix k1 = rhs(seg, t, rho);
      const Matrix k2 = rhs(seg, t + 0.5 * h, rho + 0.5 * h * k1);
      const Matrix k3 = rhs(seg, t + 0.5 * h, rho + 0.5 * h * k2);
      const Matrix k4 = rhs(seg, t + h, rho + h * k3);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      const bool last = k + 1 == steps;
      const double t_next = last ? seg.end : t + h;
      detail::check_finite(rho, t_next);
      if (last || (k + 1) % control.record_stride == 0) {
        traj.record(t_next, rho);
      }
    }
  }
  return traj;
}

enum class TransferMode { ideal, pulsed };

struct StorageOptions {
  /// ideal: the memory map is applied instantaneously; pulsed: the pulse
  /// sequences are integrated with decay active throughout.
  TransferMode transfer = TransferMode::ideal;
  MemorySequenceOptions sequence;
  StepControl step;
};

struct StorageReport {
  double stored_fidelity_optical = 0.0;
  double stored_fidelity_memory = 0.0;
  double hold_time = 0.0;
  TransferMode transfer = TransferMode::ideal;
};

/// Holds `rho0` for `hold_time` (a) as is, on the optical transition, and
/// (b) after transfer to the ground-state pair followed by retrieval, and
/// reports the fidelity of each final state with `rho0`.
inline StorageReport storage_comparison(
    const DensityMatrix &rho0, const LevelSystem &system,
    const std::vector<DecayChannel> &channels, double hold_time,
    const StorageOptions &opts = {}) {
  if (!(hold_time > 0.0) || !std::isfinite(hold_time)) {
    throw IntegrationError("hold time must be positive");
  }
  PulseSchedule hold;
  hold.extend_to(hold_time);
  auto settle = [](const Matrix &m) {
    return DensityMatrix(m, kIntegratedTolerance);
  };

  StorageReport report;
  report.hold_time = hold_time;
  report.transfer = opts.transfer;

  const Trajectory optical =
      propagate_lindblad(rho0, system, hold, channels, opts.step);
  report.stored_fidelity_optical =
      fidelity(settle(optical.final_state()), rho0);

  const PulseSchedule forward = memory_sequence(system, opts.sequence);
  Matrix final_memory;
  if (opts.transfer == TransferMode::ideal) {
    const UnitaryOperator u(ideal_unitary(forward, system), 1e-10);
    const DensityMatrix stored = apply_unitary(rho0, u);
    const Trajectory held =
        propagate_lindblad(stored, system, hold, channels, opts.step);
    final_memory = u.matrix().adjoint() * held.final_state() * u.matrix();
  } else {
    const PulseSchedule round_trip =
        concatenate(forward, reverse_sequence(forward), hold_time);
    final_memory =
        propagate_lindblad(rho0, system, round_trip, channels, opts.step)
            .final_state();
  }
  report.stored_fidelity_memory = fidelity(settle(final_memory), rho0);
  return report;
}

/// Largest entry of |U_realized − U_ideal|, where U_ideal is the product of
/// the impulse-limit rotations of the schedule.
inline double impulse_limit_check(const PulseSchedule &schedule,
                                  const LevelSystem &system,
                                  const StepControl &control = {}) {
  return max_abs(realized_unitary(system, schedule, control) -
                 ideal_unitary(schedule, system));
}

}  // namespace qmem
