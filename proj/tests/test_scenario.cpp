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

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmem/scenario.hpp"
#include "support.hpp"

namespace qmem::scenario {
namespace {

namespace fs = std::filesystem;

const fs::path kFixtures = QMEM_SCENARIO_DIR;

std::string slurp(const fs::path &p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string &name) {
  const auto dir = fs::temp_directory_path() / ("qmem_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::vector<std::vector<double>> csv_rows(const fs::path &p) {
  std::istringstream in(slurp(p));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::vector<double> row;
    for (const auto &cell : detail::split(line, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

std::map<std::string, std::string> report(const fs::path &p) {
  std::istringstream in(slurp(p));
  std::map<std::string, std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find(" = ");
    out[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return out;
}

const char *kMinimal = R"(
system.levels = g1, g2, e1, e2
system.energies = 0, 0, 100, 120
system.transitions = g1-e1, g1-e2, g2-e2
state.amplitudes = 1, 0, 0, 0
)";

std::string with(const std::string &extra) { return std::string(kMinimal) + extra; }

std::string error_of(const std::string &text) {
  try {
    parse_scenario(text);
  } catch (const ScenarioError &e) {
    return e.what();
  }
  return "";
}

TEST(ParseScenario, TransferFixture) {
  const auto sc = load_scenario(kFixtures / "memory_transfer.qmem");
  EXPECT_EQ(sc.system.dim(), 4u);
  EXPECT_EQ(addressable_edges(sc.system).size(), 3u);
  EXPECT_EQ(sc.source, ScheduleSource::memory_sequence);
  ASSERT_TRUE(sc.initial_state);
  EXPECT_LE(max_abs(sc.initial_state->matrix() - testing::rho_optical()), 1e-15);
  EXPECT_FALSE(sc.lindblad);
}

TEST(ParseScenario, EmptyFile) {
  EXPECT_EQ(error_of(""), "no system declared");
  EXPECT_EQ(error_of("# format=1\n# nothing\n"), "no system declared");
}

TEST(ParseScenario, PulseOnUndeclaredEdge) {
  const auto msg = error_of(with("pulses.pulse = g1-g2 theta=pi\n"));
  EXPECT_NE(msg.find("line 6"), std::string::npos) << msg;
  EXPECT_NE(msg.find("g1-g2"), std::string::npos) << msg;
  const auto unknown = error_of(with("pulses.pulse = g1-x3 theta=pi\n"));
  EXPECT_NE(unknown.find("g1-x3"), std::string::npos) << unknown;
}

TEST(ParseScenario, Errors) {
  EXPECT_NE(error_of(with("system.colour = red\n")).find("unknown key"), std::string::npos);
  EXPECT_NE(error_of(with("pulses.sequence = memory-sequence\npulses.pulse = g1-e1 theta=pi\n"))
                .find("conflicting schedule sources"),
            std::string::npos);
  EXPECT_NE(error_of(with("pulses.sequence = memory-roundtrip\n")).find("unknown pulse sequence"),
            std::string::npos);
  EXPECT_NE(error_of("# format=2\n" + std::string(kMinimal)).find("unsupported"), std::string::npos);
  EXPECT_NE(error_of(with("decay.channels = g1>e1\ndecay.rate = 0.1\n")).find("downhill"),
            std::string::npos);
  EXPECT_NE(error_of(with("pulses.pulse = g1-e1 theta=pi area=1\n")).find("exactly one"),
            std::string::npos);
  EXPECT_NE(error_of(with("system.levels = a\n")).find("duplicate key"), std::string::npos);
  EXPECT_NE(error_of("system.levels = a, a\n").find("duplicate level label"), std::string::npos);
}

TEST(ParseScenario, AmplitudeNormalization) {
  const std::string text =
      "system.levels = a, b\nsystem.transitions = a-b\nstate.amplitudes = 1, 1\n";
  EXPECT_NO_THROW(parse_scenario(text));
  EXPECT_NE(error_of(text + "state.normalize = off\n").find("normalized"), std::string::npos);
}

TEST(ParseScenario, ComplexAndPiValues) {
  EXPECT_EQ(detail::complex_value("0.3-0.4i"), Complex(0.3, -0.4));
  EXPECT_EQ(detail::complex_value("-i"), Complex(0.0, -1.0));
  EXPECT_EQ(detail::complex_value("2i"), Complex(0.0, 2.0));
  EXPECT_EQ(detail::complex_value("1e-3+2e-2i"), Complex(1e-3, 2e-2));
  EXPECT_EQ(detail::complex_value("1.5"), Complex(1.5, 0.0));
  EXPECT_FALSE(detail::complex_value("x"));
  EXPECT_DOUBLE_EQ(*detail::real_value("pi/2"), kPi / 2);
  EXPECT_DOUBLE_EQ(*detail::real_value("-2pi"), -2 * kPi);
  EXPECT_DOUBLE_EQ(*detail::real_value("0.5*pi"), 0.5 * kPi);
  EXPECT_DOUBLE_EQ(*detail::real_value("3/4"), 0.75);
  EXPECT_FALSE(detail::real_value("pi/0"));
}

TEST(ParseScenario, DensityAndExplicitPulses) {
  const auto sc = parse_scenario(R"(
system.levels = g1, g2, e1, e2
system.energies = 0, 0, 100, 120
system.transitions = g1-e1, g1-e2, g2-e2
system.dipoles = 2, 1, 1
state.density = g1:g1=0.2, e1:e1=0.8, g1:e1=0.4
pulses.shape = square
pulses.width = 2
pulses.pulse = g1-e1 theta=pi phase=pi/2
pulses.pulse = g1-e2 area=0.25 shape=gaussian width=0.5 gap=1
pulses.pulse = g2-e2 amplitude=0.1 phase=-1
)");
  EXPECT_LE(max_abs(sc.initial_state->matrix() - testing::rho_optical()), 0.0);
  const auto sched = sc.schedule();
  ASSERT_EQ(sched.size(), 3u);
  EXPECT_NEAR(pulse_area(sched[0].envelope), kPi / 4, 1e-14);
  EXPECT_NEAR(pulse_area(sched[1].envelope), 0.25, 1e-14);
  EXPECT_DOUBLE_EQ(sched[1].envelope.begin(), 3.0);
  EXPECT_DOUBLE_EQ(sched[2].envelope.amplitude(), 0.1);
  EXPECT_DOUBLE_EQ(sched[2].carrier_phase, -1.0);
}

TEST(Run, SimulateTransferFixture) {
  auto sc = load_scenario(kFixtures / "memory_transfer.qmem");
  const auto dir = scratch("simulate");
  const auto r = run(sc, Command::simulate, {.out_dir = dir});
  ASSERT_EQ(r.status, 0) << r.message;
  ASSERT_EQ(r.artifacts.size(), 1u);
  const auto rows = csv_rows(r.artifacts[0]);
  ASSERT_FALSE(rows.empty());
  const auto &last = rows.back();
  ASSERT_EQ(last.size(), 10u);
  EXPECT_NEAR(last[1], 0.2, 1e-6);
  EXPECT_NEAR(last[2], 0.8, 1e-6);
  EXPECT_NEAR(last[7], 0.4, 1e-6);
  EXPECT_NEAR(last[3], 0.0, 1e-6);
  EXPECT_NEAR(last[5], 0.0, 1e-6);
}

TEST(Run, Deterministic) {
  auto sc = load_scenario(kFixtures / "memory_transfer.qmem");
  const auto a = run(sc, Command::simulate, {.out_dir = scratch("det_a")});
  const auto b = run(sc, Command::simulate, {.out_dir = scratch("det_b")});
  ASSERT_EQ(a.status, 0);
  ASSERT_EQ(b.status, 0);
  EXPECT_EQ(slurp(a.artifacts[0]), slurp(b.artifacts[0]));
}

TEST(Run, CompileIdentity) {
  auto sc = parse_scenario(with("pulses.target = identity\n"));
  const auto dir = scratch("compile_identity");
  const auto r = run(sc, Command::compile, {.out_dir = dir});
  ASSERT_EQ(r.status, 0) << r.message;
  const std::string csv = slurp(dir / "rotations.csv");
  EXPECT_EQ(csv, "# format=1\nedge_a, edge_b, theta, phi\n");
  const auto rep = report(dir / "report.txt");
  EXPECT_EQ(rep.at("rotation_count"), "0");
  EXPECT_EQ(rep.at("exact"), "true");
}

TEST(Run, CompileMemoryTarget) {
  auto sc = load_scenario(kFixtures / "memory_transfer.qmem");
  const auto dir = scratch("compile_memory");
  const auto r = run(sc, Command::compile, {.out_dir = dir});
  ASSERT_EQ(r.status, 0) << r.message;
  const auto rep = report(dir / "memory_transfer_report.txt");
  EXPECT_LE(std::stod(rep.at("max_reconstruction_error")), 1e-12);
  const auto rows = slurp(dir / "memory_transfer_rotations.csv");
  EXPECT_EQ(rows.rfind("# format=1\nedge_a, edge_b, theta, phi\n", 0), 0u);
}

TEST(Run, StoreRetrieveWithoutDecay) {
  auto sc = load_scenario(kFixtures / "store_roundtrip.qmem");
  const auto dir = scratch("store_lossless");
  const auto r = run(sc, Command::store_retrieve, {.out_dir = dir, .seed = 42});
  ASSERT_EQ(r.status, 0) << r.message;
  const auto rep = report(dir / "store_roundtrip_report.txt");
  EXPECT_GE(std::stod(rep.at("stored_fidelity_optical")), 1.0 - 1e-6);
  EXPECT_GE(std::stod(rep.at("stored_fidelity_memory")), 1.0 - 1e-6);
  EXPECT_EQ(rep.at("seed"), "42");
}

TEST(Run, FailureLeavesNothingBehind) {
  // simulate without an initial state fails after nothing is written.
  auto sc = parse_scenario(
      "system.levels = g1, g2, e1, e2\nsystem.transitions = g1-e1\n");
  const auto dir = scratch("failure");
  const auto r = run(sc, Command::simulate, {.out_dir = dir});
  EXPECT_NE(r.status, 0);
  EXPECT_FALSE(r.message.empty());
  EXPECT_TRUE(!fs::exists(dir) || fs::is_empty(dir));

  // Failing after the rotation file was staged removes it too.
  auto bad = parse_scenario(
      "system.levels = a, b\nsystem.transitions = a-b\n"
      "output.report = missing/dir/report.txt\n");
  const auto dir2 = scratch("failure2");
  const auto r2 = run(bad, Command::compile, {.out_dir = dir2});
  EXPECT_NE(r2.status, 0);
  EXPECT_FALSE(fs::exists(dir2 / "rotations.csv"));
  EXPECT_FALSE(fs::exists(dir2 / "rotations.csv.partial"));
}

TEST(Run, EveryFixtureRunsEveryCommand) {
  for (const auto &entry : fs::directory_iterator(kFixtures)) {
    if (entry.path().extension() != ".qmem") continue;
    const auto sc = load_scenario(entry.path());
    for (auto cmd : {Command::compile, Command::simulate, Command::store_retrieve}) {
      const auto r = run(sc, cmd, {.out_dir = scratch("fixtures")});
      EXPECT_EQ(r.status, 0) << entry.path() << ": " << r.message;
    }
  }
}

TEST(Run, DecayDemoFavoursMemory) {
  const auto sc = load_scenario(kFixtures / "decay_demo.qmem");
  const auto dir = scratch("decay_demo");
  const auto r = run(sc, Command::store_retrieve, {.out_dir = dir});
  ASSERT_EQ(r.status, 0) << r.message;
  const auto rep = report(dir / "decay_demo_report.txt");
  EXPECT_GT(std::stod(rep.at("stored_fidelity_memory")),
            std::stod(rep.at("stored_fidelity_optical")));
}

}  // namespace
}  // namespace qmem::scenario
