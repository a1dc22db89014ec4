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

// qmem: compile and simulate quantum-memory pulse sequences.
//
//   qmem compile|simulate|store-retrieve <scenario> [--out DIR]
//        [--step-scale F] [--seed N]

#include <CLI11.hpp>
#include <iostream>

#include "qmem/scenario.hpp"

int main(int argc, char **argv) {
  CLI::App app{"Quantum-memory pulse compiler and simulator"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir;
  double step_scale = 0.0;
  unsigned long long seed = 0;

  qmem::scenario::Command command{};
  auto add = [&](const char *name, const char *help, qmem::scenario::Command c) {
    auto *sub = app.add_subcommand(name, help);
    sub->add_option("scenario", scenario_path, "Scenario file")->required();
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--step-scale", step_scale, "Integrator step multiplier")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for randomized harnesses");
    sub->callback([&command, c] { command = c; });
  };
  add("compile", "Decompose the target unitary into edge rotations",
      qmem::scenario::Command::compile);
  add("simulate", "Integrate the pulse schedule and write the trajectory",
      qmem::scenario::Command::simulate);
  add("store-retrieve", "Compare optical and memory storage fidelities",
      qmem::scenario::Command::store_retrieve);

  CLI11_PARSE(app, argc, argv);

  qmem::scenario::Scenario sc;
  try {
    sc = qmem::scenario::load_scenario(scenario_path);
  } catch (const qmem::Error &err) {
    std::cerr << scenario_path << ": " << err.what() << '\n';
    return 2;
  }

  qmem::scenario::RunOptions opts;
  if (!out_dir.empty()) opts.out_dir = out_dir;
  if (step_scale > 0.0) opts.step_scale = step_scale;
  for (auto *sub : app.get_subcommands()) {
    if (sub->count("--seed")) opts.seed = seed;
  }

  const auto result = qmem::scenario::run(std::move(sc), command, opts);
  if (result.status != 0) {
    std::cerr << "qmem: " << result.message << '\n';
    return result.status;
  }
  for (const auto &p : result.artifacts) std::cout << p.string() << '\n';
  return 0;
}
