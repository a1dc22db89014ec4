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

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "qmem/compiler.hpp"
#include "qmem/dynamics.hpp"
#include "qmem/io.hpp"

namespace qmem::scenario {

/// Parse failure; `line()` is 1-based, 0 when not tied to a line.
class ScenarioError : public Error {
 public:
  ScenarioError(std::size_t line, const std::string &message)
      : Error(line ? "line " + std::to_string(line) + ": " + message : message),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class ScheduleSource { none, explicit_pulses, memory_sequence, memory_roundtrip };
enum class TargetKind { schedule, identity, memory, matrix };

/// One explicitly declared pulse; placed after the previous one with `gap`.
struct PulseSpec {
  Edge edge;
  EnvelopeShape shape;
  double amplitude = 0.0;
  double phase = 0.5 * kPi;
  double gap = 0.0;
};

struct Scenario {
  LevelSystem system;
  std::optional<DensityMatrix> initial_state;
  std::vector<DecayChannel> channels;

  ScheduleSource source = ScheduleSource::none;
  double roundtrip_hold = 0.0;
  MemorySequenceOptions sequence;
  std::vector<PulseSpec> pulses;

  std::optional<TargetKind> target_kind;
  Matrix target_matrix;

  bool lindblad = false;
  StepControl step;
  TransferMode transfer = TransferMode::ideal;
  std::optional<double> hold_time;

  std::filesystem::path output_dir = ".";
  std::string trajectory_file = "trajectory.csv";
  std::string rotations_file = "rotations.csv";
  std::string report_file = "report.txt";

  PulseSchedule schedule() const {
    switch (source) {
      case ScheduleSource::none:
        return {};
      case ScheduleSource::explicit_pulses: {
        PulseSchedule s;
        for (const auto &p : pulses) {
          s.append(p.edge, p.shape, p.amplitude, p.phase, p.gap);
        }
        return s;
      }
      case ScheduleSource::memory_sequence:
        return memory_sequence(system, sequence);
      case ScheduleSource::memory_roundtrip: {
        const PulseSchedule fwd = memory_sequence(system, sequence);
        return concatenate(fwd, reverse_sequence(fwd), roundtrip_hold);
      }
    }
    return {};
  }

  /// Unitary handed to the compiler.
  Matrix target() const {
    const auto n = static_cast<Eigen::Index>(system.dim());
    TargetKind kind = target_kind.value_or(
        source == ScheduleSource::none ? TargetKind::identity
                                       : TargetKind::schedule);
    switch (kind) {
      case TargetKind::identity:
        return Matrix::Identity(n, n);
      case TargetKind::memory:
        return ideal_unitary(memory_sequence(system, sequence), system);
      case TargetKind::matrix:
        return target_matrix;
      case TargetKind::schedule:
        return ideal_unitary(schedule(), system);
    }
    return Matrix::Identity(n, n);
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

inline std::vector<std::string> words(std::string_view s) {
  std::istringstream is{std::string(s)};
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

inline std::optional<double> plain_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  std::string buf(s);
  char *end = nullptr;
  const double v = std::strtod(buf.c_str(), &end);
  if (end != buf.c_str() + buf.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

/// Accepts plain numbers and multiples of pi: "0.5", "pi", "-pi/2",
/// "2pi", "0.5*pi", "3/4".
inline std::optional<double> real_value(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  double sign = 1.0;
  if (s[0] == '-' || s[0] == '+') {
    if (s[0] == '-') sign = -1.0;
    s.erase(0, 1);
  }
  double denom = 1.0;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    auto d = plain_number(trim(s.substr(slash + 1)));
    if (!d || *d == 0.0) return std::nullopt;
    denom = *d;
    s = trim(s.substr(0, slash));
  }
  double value;
  if (auto p = s.find("pi"); p != std::string::npos && p + 2 == s.size()) {
    std::string coef = trim(s.substr(0, p));
    if (!coef.empty() && coef.back() == '*') coef = trim(coef.substr(0, coef.size() - 1));
    double c = 1.0;
    if (!coef.empty()) {
      auto v = plain_number(coef);
      if (!v) return std::nullopt;
      c = *v;
    }
    value = c * kPi;
  } else {
    auto v = plain_number(s);
    if (!v) return std::nullopt;
    value = *v;
  }
  return sign * value / denom;
}

/// "1", "-0.5", "2i", "-i", "0.3+0.4i", "1e-3-2e-2i".
inline std::optional<Complex> complex_value(std::string_view text) {
  std::string s = trim(text);
  if (s.empty()) return std::nullopt;
  if (s.back() != 'i') {
    auto v = real_value(s);
    if (!v) return std::nullopt;
    return Complex(*v, 0.0);
  }
  s.pop_back();
  std::size_t split_at = std::string::npos;
  for (std::size_t i = s.size(); i-- > 1;) {
    if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
      split_at = i;
      break;
    }
  }
  auto imag_part = [](std::string t) -> std::optional<double> {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return plain_number(t);
  };
  if (split_at == std::string::npos) {
    auto im = imag_part(s);
    if (!im) return std::nullopt;
    return Complex(0.0, *im);
  }
  auto re = plain_number(s.substr(0, split_at));
  auto im = imag_part(s.substr(split_at));
  if (!re || !im) return std::nullopt;
  return Complex(*re, *im);
}

struct Entry {
  std::string value;
  std::size_t line;
};

inline const std::vector<std::string> &known_keys() {
  static const std::vector<std::string> keys = {
      "system.levels",      "system.energies",     "system.transitions",
      "system.dipoles",     "system.addressable",  "state.amplitudes",
      "state.density",      "state.normalize",     "pulses.sequence",
      "pulses.pulse",       "pulses.shape",        "pulses.width",
      "pulses.gap",         "pulses.target",       "decay.channels",
      "decay.rate",         "decay.rates",         "integrate.lindblad",
      "integrate.step_scale", "integrate.transfer", "integrate.hold",
      "integrate.record_stride", "output.dir",     "output.trajectory",
      "output.rotations",   "output.report"};
  return keys;
}

class Reader {
 public:
  explicit Reader(std::string_view text) {
    std::size_t line = 0;
    std::istringstream is{std::string(text)};
    for (std::string raw; std::getline(is, raw);) {
      ++line;
      std::string s = trim(raw);
      if (s.rfind('#', 0) == 0) {
        check_version(s, line);
        continue;
      }
      if (auto hash = s.find('#'); hash != std::string::npos) s = trim(s.substr(0, hash));
      if (s.empty()) continue;
      const auto eq = s.find('=');
      if (eq == std::string::npos) {
        throw ScenarioError(line, "expected 'section.key = value'");
      }
      const std::string key = trim(s.substr(0, eq));
      const auto &keys = known_keys();
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
        throw ScenarioError(line, "unknown key '" + key + "'");
      }
      auto &slot = entries_[key];
      if (!slot.empty() && key != "pulses.pulse") {
        throw ScenarioError(line, "duplicate key '" + key + "'");
      }
      slot.push_back({trim(s.substr(eq + 1)), line});
    }
  }

  const Entry *get(const std::string &key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second.front();
  }
  std::vector<Entry> all(const std::string &key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? std::vector<Entry>{} : it->second;
  }

 private:
  static void check_version(const std::string &comment, std::size_t line) {
    std::string body = trim(std::string_view(comment).substr(1));
    if (body.rfind("format", 0) != 0) return;
    const auto eq = body.find('=');
    if (eq == std::string::npos) return;
    if (trim(body.substr(eq + 1)) != "1") {
      throw ScenarioError(line, "unsupported scenario format '" +
                                    trim(body.substr(eq + 1)) + "'");
    }
  }

  std::map<std::string, std::vector<Entry>> entries_;
};

inline double need_real(const std::string &text, std::size_t line,
                        const std::string &what) {
  auto v = real_value(text);
  if (!v) throw ScenarioError(line, "invalid number for " + what + ": '" + text + "'");
  return *v;
}

inline bool need_bool(const Entry &e, const std::string &what) {
  if (e.value == "on" || e.value == "true" || e.value == "yes") return true;
  if (e.value == "off" || e.value == "false" || e.value == "no") return false;
  throw ScenarioError(e.line, "expected on/off for " + what);
}

inline Edge need_edge(const LevelSystem &system, const std::string &token,
                      std::size_t line, char sep = '-') {
  const auto parts = split(token, sep);
  if (parts.size() != 2) {
    throw ScenarioError(line, "malformed edge '" + token + "'");
  }
  auto a = system.index_of(parts[0]);
  auto b = system.index_of(parts[1]);
  if (!a || !b) {
    throw ScenarioError(line, "edge " + token + " references an undeclared level");
  }
  return {*a, *b};
}

inline Shape need_shape(const std::string &s, std::size_t line) {
  if (s == "gaussian") return Shape::gaussian;
  if (s == "square") return Shape::square;
  throw ScenarioError(line, "unknown pulse shape '" + s + "'");
}

}  // namespace detail

/// Parses the line-oriented `section.key = value` scenario format.
inline Scenario parse_scenario(std::string_view text) {
  using namespace detail;
  const Reader in(text);
  Scenario sc;

  // system
  const Entry *levels = in.get("system.levels");
  if (!levels) throw ScenarioError(0, "no system declared");
  for (const auto &label : split(levels->value, ',')) {
    if (label.empty() || label.find_first_of("-:>= \t") != std::string::npos) {
      throw ScenarioError(levels->line, "invalid level label '" + label + "'");
    }
    sc.system.levels.push_back({label, 0.0});
  }
  const std::size_t n = sc.system.levels.size();
  if (const Entry *e = in.get("system.energies")) {
    const auto vals = split(e->value, ',');
    if (vals.size() != n) throw ScenarioError(e->line, "expected one energy per level");
    for (std::size_t i = 0; i < n; ++i) {
      sc.system.levels[i].energy = need_real(vals[i], e->line, "energy");
    }
  }
  if (const Entry *e = in.get("system.transitions")) {
    for (const auto &tok : split(e->value, ',')) {
      const Edge edge = need_edge(sc.system, tok, e->line);
      sc.system.transitions.push_back({sc.system.levels[edge.a].label,
                                       sc.system.levels[edge.b].label, 1.0, true});
    }
  }
  auto &transitions = sc.system.transitions;
  if (const Entry *e = in.get("system.dipoles")) {
    const auto vals = split(e->value, ',');
    if (vals.size() != transitions.size()) {
      throw ScenarioError(e->line, "expected one dipole strength per transition");
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
      transitions[i].dipole = need_real(vals[i], e->line, "dipole strength");
    }
  }
  if (const Entry *e = in.get("system.addressable")) {
    for (auto &t : transitions) t.addressable = false;
    for (const auto &tok : split(e->value, ',')) {
      if (tok.empty()) continue;
      const Edge edge = need_edge(sc.system, tok, e->line);
      auto it = std::find_if(transitions.begin(), transitions.end(), [&](const Transition &t) {
        return sc.system.edge(t.from, t.to) == edge;
      });
      if (it == transitions.end()) {
        throw ScenarioError(e->line, "addressable edge " + tok + " is not a transition");
      }
      it->addressable = true;
    }
  }
  if (auto report = validate(sc.system); !report) {
    throw ScenarioError(levels->line, "invalid system: " + report.to_string());
  }

  // state
  const Entry *amps = in.get("state.amplitudes");
  const Entry *dens = in.get("state.density");
  if (amps && dens) {
    throw ScenarioError(dens->line, "state given both as amplitudes and as density");
  }
  bool normalize = true;
  if (const Entry *e = in.get("state.normalize")) normalize = need_bool(*e, "state.normalize");
  try {
    if (amps) {
      const auto vals = split(amps->value, ',');
      if (vals.size() != n) throw ScenarioError(amps->line, "expected one amplitude per level");
      Vector v(static_cast<Eigen::Index>(n));
      for (std::size_t i = 0; i < n; ++i) {
        auto c = complex_value(vals[i]);
        if (!c) throw ScenarioError(amps->line, "invalid amplitude '" + vals[i] + "'");
        v(static_cast<Eigen::Index>(i)) = *c;
      }
      sc.initial_state = density_from_pure(normalize ? PureState::normalized(v) : PureState(v));
    } else if (dens) {
      const auto dim = static_cast<Eigen::Index>(n);
      Matrix m = Matrix::Zero(dim, dim);
      for (const auto &item : split(dens->value, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) {
          throw ScenarioError(dens->line, "expected 'a:b=value', got '" + item + "'");
        }
        const Edge at = need_edge(sc.system, trim(item.substr(0, eq)), dens->line, ':');
        auto c = complex_value(item.substr(eq + 1));
        if (!c) throw ScenarioError(dens->line, "invalid density entry '" + item + "'");
        const auto i = static_cast<Eigen::Index>(at.a);
        const auto j = static_cast<Eigen::Index>(at.b);
        m(i, j) = *c;
        if (i != j) m(j, i) = std::conj(*c);
      }
      sc.initial_state = DensityMatrix(m);
    }
  } catch (const ScenarioError &) {
    throw;
  } catch (const Error &err) {
    throw ScenarioError(amps ? amps->line : dens->line, err.what());
  }

  // pulses
  if (const Entry *e = in.get("pulses.shape")) {
    sc.sequence.shape.kind = need_shape(e->value, e->line);
    if (sc.sequence.shape.kind == Shape::square) sc.sequence.shape.width = 1.0;
  }
  if (const Entry *e = in.get("pulses.width")) {
    sc.sequence.shape.width = need_real(e->value, e->line, "pulse width");
    if (!(sc.sequence.shape.width > 0.0)) throw ScenarioError(e->line, "pulse width must be positive");
  }
  if (const Entry *e = in.get("pulses.gap")) {
    sc.sequence.gap = need_real(e->value, e->line, "pulse gap");
    if (!(sc.sequence.gap >= 0.0)) throw ScenarioError(e->line, "pulse gap must be non-negative");
  }

  const Entry *sequence = in.get("pulses.sequence");
  const auto explicit_pulses = in.all("pulses.pulse");
  if (sequence && !explicit_pulses.empty()) {
    const std::size_t line = std::max(sequence->line, explicit_pulses.front().line);
    throw ScenarioError(line, "conflicting schedule sources (pulses.sequence and pulses.pulse)");
  }
  if (sequence) {
    const auto w = words(sequence->value);
    if (w.empty()) throw ScenarioError(sequence->line, "empty pulse sequence");
    if (w[0] == "memory-sequence" && w.size() == 1) {
      sc.source = ScheduleSource::memory_sequence;
    } else if (w[0] == "memory-roundtrip" && w.size() == 2 && w[1].rfind("hold=", 0) == 0) {
      sc.source = ScheduleSource::memory_roundtrip;
      sc.roundtrip_hold = need_real(w[1].substr(5), sequence->line, "hold");
      if (!(sc.roundtrip_hold >= 0.0)) throw ScenarioError(sequence->line, "hold must be non-negative");
    } else {
      throw ScenarioError(sequence->line, "unknown pulse sequence '" + sequence->value + "'");
    }
    for (const char *edge : {"g2-e2", "g1-e2", "g1-e1"}) {
      const auto parts = split(edge, '-');
      auto a = sc.system.index_of(parts[0]);
      auto b = sc.system.index_of(parts[1]);
      if (!a || !b || !sc.system.is_addressable({*a, *b})) {
        throw ScenarioError(sequence->line, std::string("memory sequence needs addressable edge ") + edge);
      }
    }
  }
  for (const auto &entry : explicit_pulses) {
    sc.source = ScheduleSource::explicit_pulses;
    const auto w = words(entry.value);
    if (w.empty()) throw ScenarioError(entry.line, "empty pulse declaration");
    PulseSpec spec;
    spec.edge = need_edge(sc.system, w[0], entry.line);
    if (!sc.system.is_addressable(spec.edge)) {
      throw ScenarioError(entry.line, "pulse on undeclared or non-addressable edge " + w[0]);
    }
    spec.shape = sc.sequence.shape;
    spec.gap = sc.sequence.gap;
    std::optional<double> area, theta, amplitude;
    for (std::size_t k = 1; k < w.size(); ++k) {
      const auto eq = w[k].find('=');
      if (eq == std::string::npos) throw ScenarioError(entry.line, "expected key=value, got '" + w[k] + "'");
      const std::string key = w[k].substr(0, eq);
      const std::string val = w[k].substr(eq + 1);
      if (key == "shape") {
        spec.shape.kind = need_shape(val, entry.line);
      } else if (key == "width") {
        spec.shape.width = need_real(val, entry.line, "width");
      } else if (key == "area") {
        area = need_real(val, entry.line, "area");
      } else if (key == "theta") {
        theta = need_real(val, entry.line, "theta");
      } else if (key == "amplitude") {
        amplitude = need_real(val, entry.line, "amplitude");
      } else if (key == "phase") {
        spec.phase = need_real(val, entry.line, "phase");
      } else if (key == "gap") {
        spec.gap = need_real(val, entry.line, "gap");
      } else {
        throw ScenarioError(entry.line, "unknown pulse attribute '" + key + "'");
      }
    }
    if ((area ? 1 : 0) + (theta ? 1 : 0) + (amplitude ? 1 : 0) != 1) {
      throw ScenarioError(entry.line, "give exactly one of area=, theta=, amplitude=");
    }
    try {
      if (theta) area = *theta / (2.0 * sc.system.dipole(spec.edge));
      spec.amplitude = amplitude ? *amplitude : calibrate_amplitude(*area, spec.shape);
      if (!(spec.amplitude >= 0.0)) throw InvalidPulse("amplitude must be non-negative");
      if (!(spec.gap >= 0.0)) throw InvalidPulse("gap must be non-negative");
      spec.shape.check();
    } catch (const Error &err) {
      throw ScenarioError(entry.line, err.what());
    }
    sc.pulses.push_back(spec);
  }

  if (const Entry *e = in.get("pulses.target")) {
    if (e->value == "identity") {
      sc.target_kind = TargetKind::identity;
    } else if (e->value == "memory") {
      sc.target_kind = TargetKind::memory;
    } else if (e->value == "schedule") {
      sc.target_kind = TargetKind::schedule;
    } else {
      const auto rows = split(e->value, ';');
      const auto dim = static_cast<Eigen::Index>(n);
      if (rows.size() != n) throw ScenarioError(e->line, "target needs one row per level");
      Matrix m(dim, dim);
      for (std::size_t i = 0; i < n; ++i) {
        const auto cols = split(rows[i], ',');
        if (cols.size() != n) throw ScenarioError(e->line, "target row has wrong length");
        for (std::size_t j = 0; j < n; ++j) {
          auto c = complex_value(cols[j]);
          if (!c) throw ScenarioError(e->line, "invalid target entry '" + cols[j] + "'");
          m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = *c;
        }
      }
      try {
        UnitaryOperator check(m, 1e-9);
      } catch (const Error &err) {
        throw ScenarioError(e->line, err.what());
      }
      sc.target_kind = TargetKind::matrix;
      sc.target_matrix = m;
    }
  }

  // decay
  const Entry *chan = in.get("decay.channels");
  const Entry *rate = in.get("decay.rate");
  const Entry *rates = in.get("decay.rates");
  if (rate && rates) throw ScenarioError(rates->line, "give decay.rate or decay.rates, not both");
  const double common = rate ? need_real(rate->value, rate->line, "decay rate") : 0.0;
  if (!chan || chan->value == "default") {
    sc.channels = default_decay_channels(sc.system, common);
  } else {
    for (const auto &tok : split(chan->value, ',')) {
      const Edge e = need_edge(sc.system, tok, chan->line, '>');
      sc.channels.push_back({e.a, e.b, common});
    }
  }
  if (rates) {
    const auto vals = split(rates->value, ',');
    if (vals.size() != sc.channels.size()) {
      throw ScenarioError(rates->line, "expected one rate per decay channel");
    }
    for (std::size_t i = 0; i < vals.size(); ++i) {
      sc.channels[i].rate = need_real(vals[i], rates->line, "decay rate");
    }
  }
  try {
    check_channels(sc.channels, sc.system);
  } catch (const Error &err) {
    throw ScenarioError(chan ? chan->line : (rate ? rate->line : 0), err.what());
  }

  // integrate
  if (const Entry *e = in.get("integrate.lindblad")) sc.lindblad = need_bool(*e, "integrate.lindblad");
  if (const Entry *e = in.get("integrate.step_scale")) {
    sc.step.step_scale = need_real(e->value, e->line, "step scale");
    if (!(sc.step.step_scale > 0.0)) throw ScenarioError(e->line, "step scale must be positive");
  }
  if (const Entry *e = in.get("integrate.record_stride")) {
    const double s = need_real(e->value, e->line, "record stride");
    if (!(s >= 1.0) || s != std::floor(s)) throw ScenarioError(e->line, "record stride must be a positive integer");
    sc.step.record_stride = static_cast<std::size_t>(s);
  }
  if (const Entry *e = in.get("integrate.transfer")) {
    if (e->value == "ideal") {
      sc.transfer = TransferMode::ideal;
    } else if (e->value == "pulsed") {
      sc.transfer = TransferMode::pulsed;
    } else {
      throw ScenarioError(e->line, "transfer must be 'ideal' or 'pulsed'");
    }
  }
  if (const Entry *e = in.get("integrate.hold")) {
    sc.hold_time = need_real(e->value, e->line, "hold time");
    if (!(*sc.hold_time > 0.0)) throw ScenarioError(e->line, "hold time must be positive");
  }

  // output
  if (const Entry *e = in.get("output.dir")) sc.output_dir = e->value;
  if (const Entry *e = in.get("output.trajectory")) sc.trajectory_file = e->value;
  if (const Entry *e = in.get("output.rotations")) sc.rotations_file = e->value;
  if (const Entry *e = in.get("output.report")) sc.report_file = e->value;
  return sc;
}

inline Scenario load_scenario(const std::filesystem::path &path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError(0, "cannot open scenario " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

enum class Command { compile, simulate, store_retrieve };

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  std::optional<double> step_scale;
  /// Reserved for randomized harnesses; echoed in reports.
  std::optional<unsigned long long> seed;
};

struct RunResult {
  int status = 0;
  std::vector<std::filesystem::path> artifacts;
  std::string message;
};

namespace detail {

/// Collects artifacts under temporary names and renames them only when the
/// whole run succeeded.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}
  ~Artifacts() {
    std::error_code ec;
    for (const auto &[tmp, final] : staged_) std::filesystem::remove(tmp, ec);
  }

  std::ofstream open(const std::string &name) {
    std::filesystem::create_directories(dir_);
    const auto final = dir_ / name;
    auto tmp = final;
    tmp += ".partial";
    staged_.emplace_back(tmp, final);
    std::ofstream f(tmp, std::ios::binary);
    if (!f) throw Error("cannot write " + tmp.string());
    return f;
  }

  std::vector<std::filesystem::path> commit() {
    std::vector<std::filesystem::path> out;
    for (const auto &[tmp, final] : staged_) {
      std::filesystem::rename(tmp, final);
      out.push_back(final);
    }
    staged_.clear();
    return out;
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged_;
};

inline void run_compile(const Scenario &sc, Artifacts &out) {
  const UnitaryOperator target(sc.target(), 1e-9);
  const auto result = decompose(target, sc.system);
  {
    auto f = out.open(sc.rotations_file);
    io::write_rotations_csv(f, result.rotations, sc.system);
  }
  const auto n = target.dim();
  io::Report report;
  report.add("command", "compile")
      .add("dimension", std::to_string(n))
      .add("rotation_count", std::to_string(result.rotations.size()))
      .add("exact", result.exact ? "true" : "false");
  if (result.unreachable.empty()) {
    const Matrix rebuilt = sequence_product(result.rotations, n) * result.residual;
    report.add("max_reconstruction_error", max_abs(rebuilt - target.matrix()));
    for (Eigen::Index i = 0; i < n; ++i) {
      double phase = wrap_phase(std::arg(result.residual(i, i)));
      if (phase < -kPi + 1e-12) phase = kPi;
      report.add("residual_phase_" + sc.system.levels[static_cast<std::size_t>(i)].label, phase);
    }
    report.add("unreachable", "none");
  } else {
    std::string names;
    for (auto v : result.unreachable) {
      names += (names.empty() ? "" : ",") + sc.system.levels[v].label;
    }
    report.add("unreachable", names);
  }
  auto f = out.open(sc.report_file);
  report.write(f);
}

inline void run_simulate(const Scenario &sc, Artifacts &out) {
  if (!sc.initial_state) throw Error("scenario declares no initial state");
  const PulseSchedule schedule = sc.schedule();
  const Trajectory traj =
      sc.lindblad ? propagate_lindblad(*sc.initial_state, sc.system, schedule, sc.channels, sc.step)
                  : propagate_unitary(*sc.initial_state, sc.system, schedule, sc.step);
  auto f = out.open(sc.trajectory_file);
  io::write_trajectory_csv(f, traj, sc.system);
}

inline void run_store_retrieve(const Scenario &sc, const RunOptions &opts,
                               Artifacts &out) {
  if (!sc.initial_state) throw Error("scenario declares no initial state");
  double hold = 0.0;
  if (sc.hold_time) {
    hold = *sc.hold_time;
  } else if (sc.source == ScheduleSource::memory_roundtrip) {
    hold = sc.roundtrip_hold;
  } else {
    throw Error("store-retrieve needs integrate.hold or a memory-roundtrip sequence");
  }
  StorageOptions so;
  so.transfer = sc.transfer;
  so.sequence = sc.sequence;
  so.step = sc.step;
  const StorageReport r = storage_comparison(*sc.initial_state, sc.system, sc.channels, hold, so);

  double max_rate = 0.0;
  for (const auto &c : sc.channels) max_rate = std::max(max_rate, c.rate);
  io::Report report;
  report.add("command", "store-retrieve")
      .add("stored_fidelity_optical", r.stored_fidelity_optical)
      .add("stored_fidelity_memory", r.stored_fidelity_memory)
      .add("hold_time", r.hold_time)
      .add("transfer", r.transfer == TransferMode::ideal ? "ideal" : "pulsed")
      .add("decay_channels", std::to_string(sc.channels.size()))
      .add("max_decay_rate", max_rate)
      .add("step_scale", sc.step.step_scale)
      .add("seed", opts.seed ? std::to_string(*opts.seed) : "none");
  auto f = out.open(sc.report_file);
  report.write(f);
}

}  // namespace detail

/// Executes `command` and writes its artifacts. Returns status 0 on success;
/// on failure nothing is left behind and `message` holds the diagnostic.
inline RunResult run(Scenario sc, Command command, const RunOptions &opts = {}) {
  if (opts.step_scale) sc.step.step_scale = *opts.step_scale;
  detail::Artifacts out(opts.out_dir.value_or(sc.output_dir));
  RunResult result;
  try {
    switch (command) {
      case Command::compile:
        detail::run_compile(sc, out);
        break;
      case Command::simulate:
        detail::run_simulate(sc, out);
        break;
      case Command::store_retrieve:
        detail::run_store_retrieve(sc, opts, out);
        break;
    }
    result.artifacts = out.commit();
  } catch (const std::exception &err) {
    result.status = 1;
    result.message = err.what();
  }
  return result;
}

}  // namespace qmem::scenario
