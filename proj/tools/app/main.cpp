// Copyright 2026 The Thermoptic Authors
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

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "thermoptic/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace thermoptic::cli;

  CLI::App app{"Thermal-aware setpoint solver and closed-loop simulator"};
  app.require_subcommand(1);

  CommandOptions opts;
  double dstar = 0.0;
  std::uint64_t seed = 0;

  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config_path, "JSON configuration file")->required();
    sub->add_option("--out", opts.out_path, "Output file");
    sub->add_option("--dstar", dstar, "Total workload in CPUs");
    sub->add_option("--seed", seed, "Trace seed override");
    return sub;
  };
  CLI::App* validate = add("validate", "Check parameters, stability and identities");
  CLI::App* solve = add("solve", "Solve the energy-optimal setpoint for --dstar");
  CLI::App* simulate = add("simulate", "Run the closed loop over the synthetic trace");
  CLI::App* verify = add("verify", "Run the structural checks");
  CLI::App* trace = add("trace", "Write the synthetic workload trace");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  CLI::App* chosen = app.get_subcommands().front();
  if (chosen->count("--dstar") > 0) opts.dstar = dstar;
  if (chosen->count("--seed") > 0) opts.seed = seed;

  RunReport report;
  if (chosen == validate) report = cmd_validate(opts);
  else if (chosen == solve) report = cmd_solve(opts);
  else if (chosen == simulate) report = cmd_simulate(opts);
  else if (chosen == verify) report = cmd_verify(opts);
  else if (chosen == trace) report = cmd_trace(opts);

  print_report(report.exit_code == kExitOk ? std::cout : std::cerr, report);
  return report.exit_code;
}
