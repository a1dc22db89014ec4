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
#include <deque>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qmem/pulse.hpp"
#include "qmem/rotation.hpp"
#include "qmem/state.hpp"
#include "qmem/system.hpp"

namespace qmem {

/// Gaussian width for which a π/(2d)-area pulse peaks at Rabi frequency
/// `peak` (independent of d). With peak = 1 the time axis is in units 1/Ω.
inline double sigma_for_peak_rabi(double peak = 1.0) {
  return kPi / (peak * EnvelopeShape{Shape::gaussian, 1.0}.unit_area());
}

struct MemorySequenceOptions {
  EnvelopeShape shape{Shape::gaussian, sigma_for_peak_rabi()};
  double gap = 0.0;
  double start = 0.0;
};

/// Five resonant pulses g2–e2, g1–e2, g1–e1, g1–e2, g2–e2, each of area
/// π/(2d) on its transition and carrier phase π/2. Their ideal product maps
/// the optical g1–e1 qubit onto the g1–g2 ground pair.
inline PulseSchedule memory_sequence(const LevelSystem &system,
                                     const MemorySequenceOptions &opts = {}) {
  const char *order[5][2] = {
      {"g2", "e2"}, {"g1", "e2"}, {"g1", "e1"}, {"g1", "e2"}, {"g2", "e2"}};
  PulseSchedule schedule;
  for (int k = 0; k < 5; ++k) {
    if (!system.index_of(order[k][0]) || !system.index_of(order[k][1])) {
      throw InvalidSystem("memory sequence needs levels g1, g2, e1, e2");
    }
    const Edge e = system.edge(order[k][0], order[k][1]);
    if (!system.is_addressable(e)) {
      throw InvalidSystem("memory sequence needs addressable transition " +
                          system.name(e));
    }
    const double area = kPi / (2.0 * system.dipole(e));
    const double gap = k == 0 ? opts.start : opts.gap;
    schedule.append(e, opts.shape, calibrate_amplitude(area, opts.shape),
                    0.5 * kPi, gap);
  }
  return schedule;
}

/// Time-mirrored schedule over [0, end_time] with every carrier phase shifted
/// by π, so each pulse undoes its counterpart.
inline PulseSchedule reverse_sequence(const PulseSchedule &s) {
  const double span = s.end_time();
  PulseSchedule out;
  for (auto it = s.pulses().rbegin(); it != s.pulses().rend(); ++it) {
    const PulseEnvelope &env = it->envelope;
    out.push_back({env.shifted(span - env.end() - env.begin()), it->transition,
                   wrap_phase(it->carrier_phase + kPi)});
  }
  out.extend_to(span);
  return out;
}

/// `first` followed by `second`, the latter delayed by first.end_time() + gap.
inline PulseSchedule concatenate(const PulseSchedule &first,
                                 const PulseSchedule &second,
                                 double gap = 0.0) {
  PulseSchedule out = first;
  const double offset = first.end_time() + gap;
  for (const auto &p : second.pulses()) {
    out.push_back({p.envelope.shifted(offset), p.transition, p.carrier_phase});
  }
  out.extend_to(offset + second.end_time());
  return out;
}

/// Ideal rotations in time order (first pulse first).
inline std::vector<PlanarRotation> schedule_rotations(
    const PulseSchedule &schedule, const LevelSystem &system) {
  std::vector<PlanarRotation> out;
  out.reserve(schedule.size());
  for (const auto &p : schedule.pulses()) {
    out.push_back(ideal_rotation(p, system));
  }
  return out;
}

/// R(p_k)···R(p_1) for the schedule (p_1, ..., p_k).
inline Matrix ideal_unitary(const PulseSchedule &schedule,
                            const LevelSystem &system) {
  auto rotations = schedule_rotations(schedule, system);
  std::reverse(rotations.begin(), rotations.end());
  return sequence_product(rotations, static_cast<Eigen::Index>(system.dim()));
}

/// Renders a product-ordered rotation list (leftmost applied last) as a
/// back-to-back pulse schedule with the given envelope shape.
inline PulseSchedule rotations_to_schedule(
    const std::vector<PlanarRotation> &rotations, const LevelSystem &system,
    EnvelopeShape shape, double gap = 0.0) {
  PulseSchedule schedule;
  for (auto it = rotations.rbegin(); it != rotations.rend(); ++it) {
    PlanarRotation r = *it;
    if (r.angle < 0.0) r = {r.edge, -r.angle, wrap_phase(r.phase + kPi)};
    if (r.angle == 0.0) continue;
    const double area = r.angle / (2.0 * system.dipole(r.edge));
    schedule.append(r.edge, shape, calibrate_amplitude(area, shape),
                    wrap_phase(r.phase + 0.5 * kPi),
                    schedule.empty() ? 0.0 : gap);
  }
  return schedule;
}

struct DecomposeOptions {
  /// Absorb relative residual phases into pairs of π-rotations per edge.
  bool synthesize_phases = false;
  /// Entries at or below this magnitude are already zero.
  double zero_tolerance = 1e-14;
};

struct DecompositionResult {
  /// Leftmost factor first: target = product(rotations) · residual.
  std::vector<PlanarRotation> rotations;
  /// Diagonal when elimination completed; otherwise the partially reduced
  /// matrix.
  Matrix residual;
  /// Residual is a multiple of the identity.
  bool exact = false;
  /// Levels that could not be reached from an elimination pivot.
  std::vector<std::size_t> unreachable;
  std::string diagnostic;
};

namespace detail {

class EdgeGraph {
 public:
  EdgeGraph(std::size_t n, const std::vector<Edge> &edges)
      : adjacency_(n), edges_(edges) {
    for (const auto &e : edges) {
      if (e.a >= n || e.b >= n) {
        throw DimensionMismatch("edge outside the target's dimension");
      }
      adjacency_[e.a].push_back(e.b);
      adjacency_[e.b].push_back(e.a);
    }
    for (auto &nbrs : adjacency_) {
      std::sort(nbrs.begin(), nbrs.end());
      nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
    }
  }

  std::size_t size() const { return adjacency_.size(); }
  const std::vector<std::size_t> &neighbors(std::size_t v) const {
    return adjacency_[v];
  }

  /// The supplied edge joining u and v, in its supplied orientation.
  Edge edge(std::size_t u, std::size_t v) const {
    for (const auto &e : edges_) {
      if (e == Edge{u, v}) return e;
    }
    throw InvalidSystem("no edge between levels");
  }

  std::vector<std::size_t> distances_from(std::size_t source) const {
    constexpr auto kInf = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> dist(size(), kInf);
    std::deque<std::size_t> queue{source};
    dist[source] = 0;
    while (!queue.empty()) {
      const auto u = queue.front();
      queue.pop_front();
      for (auto v : adjacency_[u]) {
        if (dist[v] == kInf) {
          dist[v] = dist[u] + 1;
          queue.push_back(v);
        }
      }
    }
    return dist;
  }

  /// Lexicographically smallest shortest path from `from` to `to`.
  std::optional<std::vector<std::size_t>> path(std::size_t from,
                                               std::size_t to) const {
    const auto dist = distances_from(to);
    if (dist[from] == std::numeric_limits<std::size_t>::max()) {
      return std::nullopt;
    }
    std::vector<std::size_t> out{from};
    while (out.back() != to) {
      const auto u = out.back();
      for (auto v : adjacency_[u]) {
        if (dist[v] + 1 == dist[u]) {
          out.push_back(v);
          break;
        }
      }
    }
    return out;
  }

  std::size_t diameter() const {
    std::size_t d = 0;
    for (std::size_t v = 0; v < size(); ++v) {
      for (auto x : distances_from(v)) {
        if (x != std::numeric_limits<std::size_t>::max()) d = std::max(d, x);
      }
    }
    return d;
  }

 private:
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Edge> edges_;
};

}  // namespace detail

/// Graph diameter of the edge set over `dim` levels (ignoring unreachable
/// pairs).
inline std::size_t graph_diameter(std::size_t dim,
                                  const std::vector<Edge> &edges) {
  return detail::EdgeGraph(dim, edges).diameter();
}

/// Givens elimination of `target` using planar rotations restricted to
/// `edges`.
///
/// Columns are processed left to right and rows bottom to top; entry (r, c)
/// is zeroed by a rotation on the pair (c, r). When (c, r) is not an edge the
/// rotation is carried along the shortest path c = v0, v1, ..., vL = r: the
/// π-rotations T_k on (v_k, v_{k+1}) move |r⟩ onto |v1⟩, the rotation acts on
/// (c, v1), and the transport is undone, which costs 2L − 1 edge rotations.
inline DecompositionResult decompose(const UnitaryOperator &target,
                                     const std::vector<Edge> &edges,
                                     const DecomposeOptions &opts = {}) {
  const Eigen::Index n = target.dim();
  const auto un = static_cast<std::size_t>(n);
  const detail::EdgeGraph graph(un, edges);

  DecompositionResult result;
  Matrix m = target.matrix();
  std::vector<bool> unreachable(un, false);

  auto on_edge = [&](std::size_t u, std::size_t v, double angle,
                     double phase) {
    return oriented_as(PlanarRotation{Edge{u, v}, angle, phase},
                       graph.edge(u, v));
  };

  for (std::size_t c = 0; c + 1 < un; ++c) {
    for (std::size_t r = un - 1; r > c; --r) {
      const Complex y = m(r, c);
      if (std::abs(y) <= opts.zero_tolerance) continue;
      const auto route = graph.path(c, r);
      if (!route) {
        unreachable[r] = true;
        unreachable[c] = true;
        continue;
      }
      const Complex x = m(c, c);
      const double angle = 2.0 * std::atan2(std::abs(y), std::abs(x));
      const double phase =
          wrap_phase((std::abs(x) > 0.0 ? std::arg(x) : 0.0) - std::arg(y));

      const auto &path = *route;
      std::vector<PlanarRotation> transport;  // T_1 ... T_{L-1}
      for (std::size_t k = 1; k + 1 < path.size(); ++k) {
        transport.push_back(on_edge(path[k], path[k + 1], kPi, 0.0));
      }
      const PlanarRotation pivot = on_edge(c, path[1], angle, phase);

      // W = S^{-1} R S with S = T_1 ··· T_{L-1}; apply W to m.
      std::vector<PlanarRotation> w;
      for (auto it = transport.rbegin(); it != transport.rend(); ++it) {
        w.push_back(inverse(*it));
      }
      w.push_back(pivot);
      w.insert(w.end(), transport.begin(), transport.end());
      m = sequence_product(w, n) * m;

      // Record W† = S^{-1} R^{-1} S.
      for (auto it = transport.rbegin(); it != transport.rend(); ++it) {
        result.rotations.push_back(inverse(*it));
      }
      result.rotations.push_back(inverse(pivot));
      result.rotations.insert(result.rotations.end(), transport.begin(),
                              transport.end());
    }
  }

  for (std::size_t v = 0; v < un; ++v) {
    if (unreachable[v]) result.unreachable.push_back(v);
  }
  std::ostringstream diag;
  if (!result.unreachable.empty()) {
    diag << "unreachable levels:";
    for (auto v : result.unreachable) diag << ' ' << v;
    result.residual = m;
    result.exact = false;
    result.diagnostic = diag.str();
    return result;
  }

  Matrix residual = m.diagonal().asDiagonal();
  const Complex ref = residual(0, 0);
  bool scalar = true;
  for (Eigen::Index i = 1; i < n; ++i) {
    scalar = scalar && std::abs(residual(i, i) - ref) <= 1e-10;
  }

  if (!scalar && opts.synthesize_phases) {
    // Spanning tree rooted at 0: each leaf v sheds its relative phase δ onto
    // its parent p through diag(e^{iδ}, e^{-iδ}) on the edge (v, p).
    const auto dist = graph.distances_from(0);
    if (std::any_of(dist.begin(), dist.end(), [](std::size_t d) {
          return d == std::numeric_limits<std::size_t>::max();
        })) {
      diag << "phase synthesis skipped: edge graph is disconnected";
    } else {
      std::vector<double> delta(un);
      double mean = 0.0;
      for (std::size_t i = 0; i < un; ++i) {
        delta[i] = std::arg(residual(i, i));
        mean += delta[i];
      }
      mean /= static_cast<double>(un);
      for (auto &d : delta) d -= mean;

      std::vector<std::size_t> order(un);
      for (std::size_t i = 0; i < un; ++i) order[i] = i;
      std::stable_sort(order.begin(), order.end(),
                       [&](auto u, auto v) { return dist[u] > dist[v]; });
      for (auto v : order) {
        if (v == 0) continue;
        std::size_t parent = 0;
        for (auto u : graph.neighbors(v)) {
          if (dist[u] + 1 == dist[v]) {
            parent = u;
            break;
          }
        }
        const Edge e = graph.edge(v, parent);
        const double gamma = e.a == v ? delta[v] : -delta[v];
        // R(π, γ+π)·R(π, 0) = diag(e^{iγ}, e^{-iγ}) on (e.a, e.b).
        result.rotations.push_back({e, kPi, wrap_phase(gamma + kPi)});
        result.rotations.push_back({e, kPi, 0.0});
        delta[parent] += delta[v];
        delta[v] = 0.0;
      }
      residual = std::polar(1.0, mean) * Matrix::Identity(n, n);
      scalar = true;
    }
  }

  result.residual = residual;
  result.exact = scalar;
  result.diagnostic = diag.str();
  return result;
}

inline DecompositionResult decompose(const UnitaryOperator &target,
                                     const LevelSystem &system,
                                     const DecomposeOptions &opts = {}) {
  return decompose(target, addressable_edges(system), opts);
}

}  // namespace qmem
