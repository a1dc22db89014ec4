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

#include <cstdio>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "qmem/compiler.hpp"
#include "qmem/dynamics.hpp"

namespace qmem::io {

inline constexpr const char *kFormatLine = "# format=1";
inline constexpr const char *kTrajectoryHeader =
    "t, pop_g1, pop_g2, pop_e1, pop_e2, re_g1e1, im_g1e1, re_g1g2, im_g1g2, "
    "trace_err";
inline constexpr const char *kRotationHeader = "edge_a, edge_b, theta, phi";

/// Decimal text with 15 significant digits.
inline std::string number(double x) {
  if (x == 0.0) x = 0.0;  // no "-0"
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.15g", x);
  return buf;
}

/// One row per sample: populations of g1, g2, e1, e2, the g1–e1 and g1–g2
/// coherences, and |tr ρ − 1|.
inline void write_trajectory_csv(std::ostream &os, const Trajectory &traj,
                                 const LevelSystem &system) {
  const auto g1 = static_cast<Eigen::Index>(system.require_index("g1"));
  const auto g2 = static_cast<Eigen::Index>(system.require_index("g2"));
  const auto e1 = static_cast<Eigen::Index>(system.require_index("e1"));
  const auto e2 = static_cast<Eigen::Index>(system.require_index("e2"));
  os << kFormatLine << '\n' << kTrajectoryHeader << '\n';
  for (std::size_t k = 0; k < traj.size(); ++k) {
    const Matrix &r = traj.states[k];
    const double row[] = {traj.times[k],     r(g1, g1).real(), r(g2, g2).real(),
                          r(e1, e1).real(),  r(e2, e2).real(), r(g1, e1).real(),
                          r(g1, e1).imag(),  r(g1, g2).real(), r(g1, g2).imag(),
                          trace_error(r)};
    for (std::size_t i = 0; i < std::size(row); ++i) {
      os << (i ? ", " : "") << number(row[i]);
    }
    os << '\n';
  }
}

inline void write_rotations_csv(std::ostream &os,
                                const std::vector<PlanarRotation> &rotations,
                                const LevelSystem &system) {
  os << kFormatLine << '\n' << kRotationHeader << '\n';
  for (const auto &r : rotations) {
    os << system.levels.at(r.edge.a).label << ", "
       << system.levels.at(r.edge.b).label << ", " << number(r.angle) << ", "
       << number(r.phase) << '\n';
  }
}

/// Flat `key = value` report.
class Report {
 public:
  Report &add(std::string key, std::string value) {
    entries_.emplace_back(std::move(key), std::move(value));
    return *this;
  }
  Report &add(std::string key, double value) {
    return add(std::move(key), number(value));
  }

  void write(std::ostream &os) const {
    os << kFormatLine << '\n';
    for (const auto &[k, v] : entries_) os << k << " = " << v << '\n';
  }

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace qmem::io
