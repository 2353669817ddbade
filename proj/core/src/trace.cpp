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

#include "thermoptic/trace.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <fmt/format.h>

#include "thermoptic/error.hpp"

namespace thermoptic {

namespace {

// Uniform double in [0, 1) from the top 53 bits; unlike the standard
// distributions this is identical across standard library implementations.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t interval_count(double interval_s, double horizon_s) {
  if (!(interval_s > 0.0) || !(horizon_s >= interval_s)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("trace needs interval > 0 and horizon >= interval "
                            "(interval {}, horizon {})",
                            interval_s, horizon_s));
  }
  return static_cast<std::size_t>(std::ceil(horizon_s / interval_s - 1e-9));
}

}  // namespace

std::size_t WorkloadTrace::index_at(double t) const {
  auto it = std::upper_bound(
      intervals.begin(), intervals.end(), t,
      [](double value, const TraceInterval& iv) { return value < iv.start; });
  if (it == intervals.begin()) return 0;
  return static_cast<std::size_t>(std::distance(intervals.begin(), it) - 1);
}

WorkloadTrace generate_trace(const DataCenterParams& p, const TraceOptions& options) {
  if (options.nominals.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "trace needs at least one nominal level");
  }
  if (!(options.jitter >= 0.0 && options.jitter < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("jitter {} outside [0, 1)", options.jitter));
  }
  if (!(options.block_s > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "block length must be positive");
  }
  for (const double nominal : options.nominals) {
    if (!(nominal >= 0.0) || nominal * (1.0 + options.jitter) > 1.0) {
      throw Error(ErrorCode::kOutOfRange,
                  fmt::format("nominal {} with jitter {} exceeds capacity", nominal,
                              options.jitter));
    }
  }

  const double capacity = p.capacity();
  const std::size_t count = interval_count(options.interval_s, options.horizon_s);
  std::mt19937_64 rng(options.seed);

  WorkloadTrace trace;
  trace.horizon = options.horizon_s;
  trace.seed = options.seed;
  trace.intervals.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double start = static_cast<double>(k) * options.interval_s;
    const auto block = static_cast<std::size_t>(std::floor(start / options.block_s));
    const double level = options.nominals[block % options.nominals.size()] * capacity;
    const double u = 2.0 * uniform01(rng) - 1.0;
    const double target = level * (1.0 + options.jitter * u);
    const double lo = std::ceil(level * (1.0 - options.jitter) - 1e-9);
    const double hi = std::floor(level * (1.0 + options.jitter) + 1e-9);
    const double dstar = lo <= hi ? std::clamp(std::round(target), lo, hi) : target;
    trace.intervals.push_back({start, dstar});
  }
  return trace;
}

WorkloadTrace aggregate_jobs(std::span<const JobBatch> batches, double interval_s,
                             double horizon_s) {
  const std::size_t count = interval_count(interval_s, horizon_s);
  WorkloadTrace trace;
  trace.horizon = horizon_s;
  trace.intervals.resize(count);
  for (std::size_t k = 0; k < count; ++k) {
    trace.intervals[k].start = static_cast<double>(k) * interval_s;
  }
  for (const JobBatch& b : batches) {
    if (b.cpus < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("job batch needs at least one CPU (got {})", b.cpus));
    }
    if (!(b.arrival >= 0.0 && b.arrival < horizon_s)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("job arrival {} outside [0, {})", b.arrival, horizon_s));
    }
    const auto k = std::min(count - 1, static_cast<std::size_t>(b.arrival / interval_s));
    trace.intervals[k].dstar += static_cast<double>(b.cpus);
  }
  return trace;
}

void require_valid_trace(const WorkloadTrace& trace, double capacity) {
  if (trace.intervals.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "trace has no intervals");
  }
  if (trace.intervals.front().start != 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "trace must start at t = 0");
  }
  for (std::size_t k = 0; k < trace.intervals.size(); ++k) {
    const TraceInterval& iv = trace.intervals[k];
    if (k > 0 && !(iv.start > trace.intervals[k - 1].start)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("trace interval {} is not after interval {}", k, k - 1));
    }
    if (!(iv.start < trace.horizon)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("trace interval {} starts at or after the horizon", k));
    }
    if (!(iv.dstar >= 0.0 && iv.dstar <= capacity)) {
      throw Error(ErrorCode::kOutOfRange,
                  fmt::format("trace interval {} has D*={} outside [0, {}]", k,
                              iv.dstar, capacity));
    }
  }
}

Matrix synthesize_gamma(int n, double level, std::uint64_t seed) {
  if (n < 1) {
    throw Error(ErrorCode::kInvalidArgument, "synthesize_gamma needs n >= 1");
  }
  if (!(level > 0.0 && level < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("recirculation level {} not in (0, 1)", level));
  }
  std::mt19937_64 rng(seed);
  Matrix g(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double weight = 0.5 + uniform01(rng);
      g(i, j) = (i == j) ? 0.1 * weight : weight;
    }
  }
  auto normalize_rows = [&] {
    for (int i = 0; i < n; ++i) g.row(i) *= level / g.row(i).sum();
  };
  normalize_rows();

  // Pull column sums toward `level` so every rack still receives CRAC air.
  const double column_cap = 0.5 * (1.0 + level);
  for (int iter = 0; iter < 100 && g.colwise().sum().maxCoeff() > column_cap; ++iter) {
    for (int j = 0; j < n; ++j) g.col(j) *= level / g.col(j).sum();
    normalize_rows();
  }
  return g;
}

}  // namespace thermoptic
