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
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qmem/errors.hpp"

namespace qmem {

struct Level {
  std::string label;
  /// Angular frequency in units of the reference Rabi frequency.
  double energy = 0.0;
};

/// A pair of basis indices. The orientation (a, b) fixes the sign convention
/// of the rotation generator e^{iφ}|a⟩⟨b| − e^{−iφ}|b⟩⟨a|; equality ignores it.
struct Edge {
  std::size_t a = 0;
  std::size_t b = 0;

  bool same_pair(const Edge &o) const {
    return (a == o.a && b == o.b) || (a == o.b && b == o.a);
  }
  friend bool operator==(const Edge &x, const Edge &y) {
    return x.same_pair(y);
  }
};

struct Transition {
  std::string from;
  std::string to;
  double dipole = 1.0;
  bool addressable = true;
};

struct LevelSystem {
  std::vector<Level> levels;
  std::vector<Transition> transitions;

  std::size_t dim() const { return levels.size(); }

  std::optional<std::size_t> index_of(const std::string &label) const {
    for (std::size_t i = 0; i < levels.size(); ++i) {
      if (levels[i].label == label) return i;
    }
    return std::nullopt;
  }

  std::size_t require_index(const std::string &label) const {
    auto i = index_of(label);
    if (!i) throw InvalidSystem("unknown level '" + label + "'");
    return *i;
  }

  Edge edge(const std::string &from, const std::string &to) const {
    return Edge{require_index(from), require_index(to)};
  }

  /// The declared transition joining the pair, in either orientation.
  const Transition *find_transition(const Edge &e) const {
    for (const auto &t : transitions) {
      auto i = index_of(t.from);
      auto j = index_of(t.to);
      if (i && j && Edge{*i, *j} == e) return &t;
    }
    return nullptr;
  }

  /// The declared orientation of the transition on `e`.
  Edge oriented(const Edge &e) const {
    const Transition *t = find_transition(e);
    if (!t) throw InvalidSystem("no transition between " + name(e));
    return edge(t->from, t->to);
  }

  double dipole(const Edge &e) const {
    const Transition *t = find_transition(e);
    if (!t) throw InvalidSystem("no transition between " + name(e));
    return t->dipole;
  }

  bool is_addressable(const Edge &e) const {
    const Transition *t = find_transition(e);
    return t != nullptr && t->addressable;
  }

  double frequency(const Transition &t) const {
    return std::abs(levels[require_index(t.to)].energy -
                    levels[require_index(t.from)].energy);
  }

  std::string name(const Edge &e) const {
    auto label = [&](std::size_t i) {
      return i < levels.size() ? levels[i].label : "#" + std::to_string(i);
    };
    return label(e.a) + "-" + label(e.b);
  }
};

/// Four-level atom with degenerate ground states g1, g2 and non-degenerate
/// excited states e1, e2. The g1–g2 pair has no transition at all; g2–e1
/// exists only as a decay path and is never driven.
inline LevelSystem four_level_system(double d_g1e1 = 1.0, double d_g1e2 = 1.0,
                                double d_g2e2 = 1.0) {
  LevelSystem s;
  s.levels = {{"g1", 0.0}, {"g2", 0.0}, {"e1", 100.0}, {"e2", 120.0}};
  s.transitions = {{"g1", "e1", d_g1e1, true},
                   {"g1", "e2", d_g1e2, true},
                   {"g2", "e2", d_g2e2, true},
                   {"g2", "e1", 1.0, false}};
  return s;
}

struct Violation {
  enum class Kind {
    duplicate_label,
    dangling_edge,
    self_loop,
    non_positive_dipole,
    duplicate_edge
  };
  Kind kind;
  /// Offending label or edge name ("a-b").
  std::string subject;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  explicit operator bool() const { return ok(); }

  std::string to_string() const {
    std::string out;
    for (const auto &v : violations) {
      if (!out.empty()) out += "; ";
      out += v.message;
    }
    return out.empty() ? "ok" : out;
  }
};

inline ValidationReport validate(const LevelSystem &system) {
  ValidationReport report;
  auto add = [&](Violation::Kind k, std::string subject, std::string msg) {
    report.violations.push_back({k, std::move(subject), std::move(msg)});
  };

  std::set<std::string> seen;
  for (const auto &l : system.levels) {
    if (!seen.insert(l.label).second) {
      add(Violation::Kind::duplicate_label, l.label,
          "duplicate level label '" + l.label + "'");
    }
  }

  std::vector<std::pair<std::string, std::string>> pairs;
  for (const auto &t : system.transitions) {
    const std::string name = t.from + "-" + t.to;
    if (!seen.count(t.from) || !seen.count(t.to)) {
      add(Violation::Kind::dangling_edge, name,
          "transition " + name + " references an undeclared level");
    }
    if (t.from == t.to) {
      add(Violation::Kind::self_loop, name,
          "transition " + name + " joins a level to itself");
    }
    if (!(t.dipole > 0.0) || !std::isfinite(t.dipole)) {
      add(Violation::Kind::non_positive_dipole, name,
          "transition " + name + " has non-positive dipole strength");
    }
    auto key = std::minmax(t.from, t.to);
    std::pair<std::string, std::string> p{key.first, key.second};
    if (std::find(pairs.begin(), pairs.end(), p) != pairs.end()) {
      add(Violation::Kind::duplicate_edge, name,
          "more than one transition between " + key.first + " and " +
              key.second);
    }
    pairs.push_back(p);
  }
  return report;
}

/// Edges offered to the compiler, in declaration order and orientation.
inline std::vector<Edge> addressable_edges(const LevelSystem &system) {
  std::vector<Edge> out;
  for (const auto &t : system.transitions) {
    if (!t.addressable) continue;
    auto i = system.index_of(t.from);
    auto j = system.index_of(t.to);
    if (i && j) out.push_back({*i, *j});
  }
  return out;
}

}  // namespace qmem
