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

#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace thermoptic::cli {

/// Stable process exit statuses.
enum ExitCode : int {
  kExitOk = 0,
  kExitViolation = 1,
  kExitInput = 2,
  kExitDivergence = 3,
};

struct CommandOptions {
  std::string config_path;
  std::string out_path;  // empty: command default
  std::optional<double> dstar;
  std::optional<std::uint64_t> seed;
};

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

struct IntervalSummary {
  std::size_t intervals = 0;
  std::size_t converged = 0;
  double max_convergence_s = 0.0;
  double mean_convergence_s = 0.0;
  double max_band = 0.0;  // degC
  double mean_cost_w = 0.0;
};

/// Outcome of one invocation. `messages` always holds at least one line.
struct RunReport {
  int exit_code = kExitOk;
  std::vector<std::string> messages;
  std::vector<std::string> violations;
  std::vector<CheckResult> checks;
  std::vector<std::string> outputs;
  std::optional<IntervalSummary> summary;
};

RunReport cmd_validate(const CommandOptions& opts);
RunReport cmd_solve(const CommandOptions& opts);
RunReport cmd_simulate(const CommandOptions& opts);
RunReport cmd_verify(const CommandOptions& opts);
RunReport cmd_trace(const CommandOptions& opts);

/// Human-readable rendering: messages, violations, the check table and the
/// written files.
void print_report(std::ostream& os, const RunReport& report);

}  // namespace thermoptic::cli
