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
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "thermoptic/params.hpp"
#include "thermoptic/simulator.hpp"
#include "thermoptic/trace.hpp"

namespace thermoptic::cli {

/// Malformed or incomplete configuration input; maps to exit status 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a command needs, re-derived from the JSON file on every call.
///
///   params  n, gamma (matrix or {"synthetic": {"level", "seed"}}), flow,
///           mass, v, w, dmax, tsafe (scalar or per-rack array), rho, cp
///   cop     a, b, c, tlo, thi
///   trace   nominals, jitter, interval_s, horizon_s, seed, block_s
///   sim     dt_s, stride, injection_policy, horizon_s
struct ConfigDocument {
  std::string path;
  nlohmann::json raw;
  DataCenterParams params;
  TraceOptions trace;
  SimulationConfig sim;
  bool synthetic_gamma = false;
};

/// Parses and converts a configuration. Throws ConfigError for unreadable
/// files, syntax errors (with line and column), missing required fields and
/// wrongly typed values. Parameter values are not validated here, except
/// for the COP curve whose constructor may throw thermoptic::Error.
ConfigDocument load_config(const std::string& path);
ConfigDocument parse_config(const std::string& text, const std::string& origin);

/// Overrides the trace seed, as --seed does.
void apply_seed(ConfigDocument& doc, std::uint64_t seed);

}  // namespace thermoptic::cli
