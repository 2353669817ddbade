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

#include "thermoptic/cli/config.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "thermoptic/cli/log.hpp"

namespace thermoptic::cli {

namespace {

using nlohmann::json;

std::pair<std::size_t, std::size_t> line_column(const std::string& text,
                                                std::size_t byte) {
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

const json& require_object(const json& parent, const char* key, const std::string& where) {
  if (!parent.contains(key)) {
    throw ConfigError(fmt::format("{}: missing required field '{}'", where, key));
  }
  const json& value = parent.at(key);
  if (!value.is_object()) {
    throw ConfigError(fmt::format("{}.{}: expected an object", where, key));
  }
  return value;
}

double number(const json& value, const std::string& name) {
  if (!value.is_number()) {
    throw ConfigError(fmt::format("{}: expected a number", name));
  }
  return value.get<double>();
}

double required_number(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) {
    throw ConfigError(fmt::format("{}: missing required field '{}'", where, key));
  }
  return number(obj.at(key), where + "." + key);
}

double optional_number(const json& obj, const char* key, const std::string& where,
                       double fallback) {
  return obj.contains(key) ? number(obj.at(key), where + "." + key) : fallback;
}

std::uint64_t unsigned_integer(const json& value, const std::string& name) {
  if (!value.is_number_unsigned() && !(value.is_number_integer() && value.get<long long>() >= 0)) {
    throw ConfigError(fmt::format("{}: expected a nonnegative integer", name));
  }
  return value.get<std::uint64_t>();
}

// A scalar is broadcast to n racks; an array is taken as is.
Vector rack_vector(const json& obj, const char* key, std::optional<int> n) {
  const std::string name = std::string("params.") + key;
  if (!obj.contains(key)) {
    throw ConfigError(fmt::format("params: missing required field '{}'", key));
  }
  const json& value = obj.at(key);
  if (value.is_number()) {
    if (!n) {
      throw ConfigError(fmt::format("{}: a scalar needs params.n or an explicit gamma", name));
    }
    return Vector::Constant(*n, value.get<double>());
  }
  if (!value.is_array()) {
    throw ConfigError(fmt::format("{}: expected a number or an array", name));
  }
  Vector out(static_cast<Eigen::Index>(value.size()));
  for (std::size_t i = 0; i < value.size(); ++i) {
    out(static_cast<Eigen::Index>(i)) = number(value[i], fmt::format("{}[{}]", name, i));
  }
  return out;
}

Matrix gamma_matrix(const json& value, std::optional<int> n, bool& synthetic) {
  if (value.is_object()) {
    const json& syn = require_object(value, "synthetic", "params.gamma");
    if (!n) {
      throw ConfigError("params.gamma.synthetic: params.n is required");
    }
    const double level = required_number(syn, "level", "params.gamma.synthetic");
    std::uint64_t seed = 1;
    if (syn.contains("seed")) seed = unsigned_integer(syn.at("seed"), "params.gamma.synthetic.seed");
    synthetic = true;
    return synthesize_gamma(*n, level, seed);
  }
  if (!value.is_array() || value.empty()) {
    throw ConfigError("params.gamma: expected a nonempty matrix or {\"synthetic\": {...}}");
  }
  const auto rows = static_cast<Eigen::Index>(value.size());
  if (!value[0].is_array()) {
    throw ConfigError("params.gamma: expected an array of rows");
  }
  const auto cols = static_cast<Eigen::Index>(value[0].size());
  Matrix g(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = value[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigError(fmt::format("params.gamma: row {} is not an array of length {}", i, cols));
    }
    for (Eigen::Index j = 0; j < cols; ++j) {
      g(i, j) = number(row[static_cast<std::size_t>(j)], fmt::format("params.gamma[{}][{}]", i, j));
    }
  }
  return g;
}

void read_params(const json& root, ConfigDocument& doc) {
  const json& pj = require_object(root, "params", "config");
  std::optional<int> n;
  if (pj.contains("n")) {
    const auto count = unsigned_integer(pj.at("n"), "params.n");
    if (count < 1) throw ConfigError("params.n: must be at least 1");
    n = static_cast<int>(count);
  }
  if (!pj.contains("gamma")) {
    throw ConfigError("params: missing required field 'gamma'");
  }
  DataCenterParams& p = doc.params;
  p.gamma = gamma_matrix(pj.at("gamma"), n, doc.synthetic_gamma);
  if (!n) n = static_cast<int>(p.gamma.rows());
  p.flow = rack_vector(pj, "flow", n);
  p.mass = rack_vector(pj, "mass", n);
  p.v = rack_vector(pj, "v", n);
  p.w = rack_vector(pj, "w", n);
  p.dmax = rack_vector(pj, "dmax", n);
  p.tsafe = rack_vector(pj, "tsafe", n);
  p.rho = optional_number(pj, "rho", "params", p.rho);
  p.cp = optional_number(pj, "cp", "params", p.cp);
}

void read_cop(const json& root, ConfigDocument& doc) {
  if (!root.contains("cop")) return;
  const json& cj = require_object(root, "cop", "config");
  doc.params.cop = CopCurve(optional_number(cj, "a", "cop", CopCurve::kDefaultA),
                            optional_number(cj, "b", "cop", CopCurve::kDefaultB),
                            optional_number(cj, "c", "cop", CopCurve::kDefaultC),
                            optional_number(cj, "tlo", "cop", CopCurve::kDefaultLo),
                            optional_number(cj, "thi", "cop", CopCurve::kDefaultHi));
}

void read_trace(const json& root, ConfigDocument& doc) {
  if (!root.contains("trace")) return;
  const json& tj = require_object(root, "trace", "config");
  TraceOptions& t = doc.trace;
  if (tj.contains("nominals")) {
    const json& nom = tj.at("nominals");
    if (!nom.is_array()) throw ConfigError("trace.nominals: expected an array");
    t.nominals.clear();
    for (std::size_t i = 0; i < nom.size(); ++i) {
      t.nominals.push_back(number(nom[i], fmt::format("trace.nominals[{}]", i)));
    }
  }
  t.jitter = optional_number(tj, "jitter", "trace", t.jitter);
  t.interval_s = optional_number(tj, "interval_s", "trace", t.interval_s);
  t.horizon_s = optional_number(tj, "horizon_s", "trace", t.horizon_s);
  t.block_s = optional_number(tj, "block_s", "trace", t.block_s);
  if (tj.contains("seed")) t.seed = unsigned_integer(tj.at("seed"), "trace.seed");
}

void read_sim(const json& root, ConfigDocument& doc) {
  if (!root.contains("sim")) return;
  const json& sj = require_object(root, "sim", "config");
  SimulationConfig& s = doc.sim;
  s.dt = optional_number(sj, "dt_s", "sim", s.dt);
  s.horizon = optional_number(sj, "horizon_s", "sim", s.horizon);
  if (sj.contains("stride")) {
    s.sample_stride = static_cast<int>(unsigned_integer(sj.at("stride"), "sim.stride"));
  }
  if (sj.contains("injection_policy")) {
    const json& value = sj.at("injection_policy");
    if (!value.is_string()) throw ConfigError("sim.injection_policy: expected a string");
    const auto policy = parse_injection_policy(value.get<std::string>());
    if (!policy) {
      throw ConfigError(fmt::format(
          "sim.injection_policy: '{}' is not 'proportional' or 'equal-split'",
          value.get<std::string>()));
    }
    s.injection = *policy;
  }
}

}  // namespace

ConfigDocument parse_config(const std::string& text, const std::string& origin) {
  ConfigDocument doc;
  doc.path = origin;
  try {
    doc.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, column] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError(fmt::format("{}:{}:{}: JSON parse error: {}", origin, line, column,
                                  e.what()));
  }
  if (!doc.raw.is_object()) {
    throw ConfigError(fmt::format("{}: top level must be a JSON object", origin));
  }
  read_params(doc.raw, doc);
  read_cop(doc.raw, doc);
  read_trace(doc.raw, doc);
  read_sim(doc.raw, doc);
  log(LogLevel::kDebug, "loaded {} with {} racks{}", origin, doc.params.size(),
      doc.synthetic_gamma ? " (synthetic gamma)" : "");
  return doc;
}

ConfigDocument load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError(fmt::format("cannot read config '{}'", path));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

void apply_seed(ConfigDocument& doc, std::uint64_t seed) { doc.trace.seed = seed; }

}  // namespace thermoptic::cli
