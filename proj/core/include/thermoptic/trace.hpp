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
#include <span>
#include <vector>

#include "thermoptic/params.hpp"

namespace thermoptic {

struct TraceInterval {
  double start = 0.0;  // s
  double dstar = 0.0;  // CPU
};

/// Piecewise-constant total workload. Interval k holds from intervals[k].start
/// until the next start (or the horizon).
struct WorkloadTrace {
  std::vector<TraceInterval> intervals;
  double horizon = 0.0;
  std::uint64_t seed = 0;

  /// Index of the interval containing t, clamped to the last interval.
  std::size_t index_at(double t) const;
  double dstar_at(double t) const { return intervals[index_at(t)].dstar; }
};

struct TraceOptions {
  /// Alternating load levels as fractions of capacity; the first entry is
  /// used for the first block.
  std::vector<double> nominals = {0.4, 0.6};
  double jitter = 0.10;
  double interval_s = 450.0;
  double horizon_s = 86400.0;
  double block_s = 43200.0;
  std::uint64_t seed = 1;
};

/// Day/night synthetic trace: each interval draws D* uniformly within
/// nominal * (1 +/- jitter) of capacity, rounded to whole CPUs inside that
/// band. Deterministic for a given seed.
WorkloadTrace generate_trace(const DataCenterParams& p, const TraceOptions& options);

/// D* per interval as the sum of the CPU demands of the batches arriving in
/// that interval.
WorkloadTrace aggregate_jobs(std::span<const JobBatch> batches, double interval_s,
                             double horizon_s);

/// Structural sanity of a trace: ordered, nonoverlapping intervals inside the
/// horizon with every D* in [0, capacity]. Throws kInvalidArgument.
void require_valid_trace(const WorkloadTrace& trace, double capacity);

/// Random recirculation matrix with strictly positive entries, every row
/// summing to `level`, a small diagonal and column sums kept below one.
/// Deterministic per seed.
Matrix synthesize_gamma(int n, double level, std::uint64_t seed);

}  // namespace thermoptic
