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
#include <string>
#include <vector>

#include "qmem/rotation.hpp"
#include "qmem/system.hpp"

namespace qmem {

enum class Shape { gaussian, square };

/// Gaussian envelopes are cut off at ±kGaussianCutoff standard deviations.
inline constexpr double kGaussianCutoff = 4.0;

/// Envelope without amplitude or position: the shape and its width
/// (σ for a gaussian, duration T for a square pulse).
struct EnvelopeShape {
  Shape kind = Shape::gaussian;
  double width = 1.0;

  void check() const {
    if (!(width > 0.0) || !std::isfinite(width)) {
      throw InvalidPulse("envelope width must be positive");
    }
  }

  /// Length of the (truncated) support.
  double support() const {
    return kind == Shape::gaussian ? 2.0 * kGaussianCutoff * width : width;
  }

  /// ∫A(t)dt over the support at unit amplitude.
  double unit_area() const {
    check();
    if (kind == Shape::square) return width;
    return width * std::sqrt(2.0 * kPi) *
           std::erf(kGaussianCutoff / std::sqrt(2.0));
  }
};

class PulseEnvelope {
 public:
  static PulseEnvelope gaussian(double amplitude, double center, double sigma) {
    return PulseEnvelope({Shape::gaussian, sigma}, amplitude,
                         center - kGaussianCutoff * sigma);
  }
  static PulseEnvelope square(double amplitude, double start, double duration) {
    return PulseEnvelope({Shape::square, duration}, amplitude, start);
  }
  /// Places `shape` so that its support begins at `start`.
  static PulseEnvelope place(EnvelopeShape shape, double amplitude,
                             double start) {
    return PulseEnvelope(shape, amplitude, start);
  }

  const EnvelopeShape &shape() const { return shape_; }
  double amplitude() const { return amplitude_; }
  double begin() const { return begin_; }
  double end() const { return begin_ + shape_.support(); }
  double center() const { return begin_ + 0.5 * shape_.support(); }

  /// A(t); zero outside the half-open support [begin, end).
  double operator()(double t) const {
    if (t < begin() || t >= end()) return 0.0;
    return profile(t);
  }

  /// The envelope formula without the support cut-off, for integrators that
  /// evaluate the closed support [begin, end].
  double profile(double t) const {
    if (shape_.kind == Shape::square) return amplitude_;
    const double x = (t - center()) / shape_.width;
    return amplitude_ * std::exp(-0.5 * x * x);
  }

  PulseEnvelope shifted(double dt) const {
    return PulseEnvelope(shape_, amplitude_, begin_ + dt);
  }
  PulseEnvelope with_amplitude(double amplitude) const {
    return PulseEnvelope(shape_, amplitude, begin_);
  }

 private:
  PulseEnvelope(EnvelopeShape shape, double amplitude, double begin)
      : shape_(shape), amplitude_(amplitude), begin_(begin) {
    shape_.check();
    if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) {
      throw InvalidPulse("pulse amplitude must be finite and non-negative");
    }
    if (!std::isfinite(begin)) throw InvalidPulse("pulse start is not finite");
  }

  EnvelopeShape shape_;
  double amplitude_;
  double begin_;
};

/// An envelope driving one transition with carrier phase φ.
///
/// The drive on edge (a, b) contributes (Ω/2)(e^{iφ}|a⟩⟨b| + h.c.) to the
/// rotating-frame Hamiltonian, with Rabi frequency Ω(t) = 2·d·A(t).
struct Pulse {
  PulseEnvelope envelope;
  Edge transition;
  double carrier_phase = 0.0;
};

/// Time-ordered pulses with disjoint supports, all starting at t ≥ 0.
/// The first pulse in the list is applied first.
class PulseSchedule {
 public:
  PulseSchedule() = default;

  void push_back(Pulse p) {
    constexpr double kSlack = 1e-12;
    if (p.envelope.begin() < -kSlack) {
      throw InvalidPulse("pulse starts before t = 0");
    }
    if (!pulses_.empty() &&
        p.envelope.begin() < pulses_.back().envelope.end() - kSlack) {
      throw InvalidPulse("pulse overlaps the previous pulse in the schedule");
    }
    pulses_.push_back(std::move(p));
  }

  /// Appends `p` so that its support starts `gap` after the current end.
  void append(Edge transition, EnvelopeShape shape, double amplitude,
              double carrier_phase, double gap = 0.0) {
    if (!(gap >= 0.0)) throw InvalidPulse("pulse gap must be non-negative");
    const double start = pulses_.empty() ? gap : pulses_.back().envelope.end() + gap;
    push_back({PulseEnvelope::place(shape, amplitude, start), transition,
               carrier_phase});
  }

  /// Keeps the timeline running (undriven) at least until `t`.
  void extend_to(double t) { padded_end_ = std::max(padded_end_, t); }

  double end_time() const {
    return std::max(padded_end_,
                    pulses_.empty() ? 0.0 : pulses_.back().envelope.end());
  }

  const std::vector<Pulse> &pulses() const { return pulses_; }
  std::size_t size() const { return pulses_.size(); }
  bool empty() const { return pulses_.empty(); }
  const Pulse &operator[](std::size_t i) const { return pulses_[i]; }

 private:
  std::vector<Pulse> pulses_;
  double padded_end_ = 0.0;
};

inline double pulse_area(const PulseEnvelope &envelope) {
  return envelope.amplitude() * envelope.shape().unit_area();
}

/// Amplitude A0 for which `shape` has area `target_area`.
inline double calibrate_amplitude(double target_area, EnvelopeShape shape) {
  if (!(target_area > 0.0) || !std::isfinite(target_area)) {
    throw InvalidPulse("calibration target area must be positive");
  }
  return target_area / shape.unit_area();
}

/// Peak Rabi frequency 2·d·A0 of an envelope on a transition of strength d.
inline double peak_rabi(const PulseEnvelope &envelope, double dipole) {
  return 2.0 * dipole * envelope.amplitude();
}

/// Impulse-limit rotation realized by `pulse`: θ = 2·d·area, φ′ = φ − π/2.
inline PlanarRotation ideal_rotation(const Pulse &pulse, double dipole) {
  if (!(dipole > 0.0)) throw InvalidPulse("dipole strength must be positive");
  return {pulse.transition, 2.0 * dipole * pulse_area(pulse.envelope),
          wrap_phase(pulse.carrier_phase - 0.5 * kPi)};
}

inline PlanarRotation ideal_rotation(const Pulse &pulse,
                                     const LevelSystem &system) {
  if (!system.find_transition(pulse.transition)) {
    throw InvalidPulse("pulse edge " + system.name(pulse.transition) +
                       " is not a transition of the system");
  }
  return ideal_rotation(pulse, system.dipole(pulse.transition));
}

/// Throws unless every pulse drives an addressable transition of `system`.
inline void check_bound(const PulseSchedule &schedule,
                        const LevelSystem &system) {
  for (const auto &p : schedule.pulses()) {
    if (p.transition.a >= system.dim() || p.transition.b >= system.dim()) {
      throw InvalidPulse("pulse edge outside the level system");
    }
    if (!system.is_addressable(p.transition)) {
      throw InvalidPulse("pulse drives non-addressable edge " +
                         system.name(p.transition));
    }
  }
}

}  // namespace qmem
