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

#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "thermoptic/controller.hpp"
#include "thermoptic/error.hpp"
#include "thermoptic/optimizer.hpp"
#include "thermoptic/params.hpp"
#include "thermoptic/trace.hpp"

namespace thermoptic {

/// How the external scheduler spreads a change in total workload.
enum class InjectionPolicy {
  kProportional,  // scale the current distribution
  kEqualSplit,    // add the same amount to every rack
};

std::string_view to_string(InjectionPolicy policy);
std::optional<InjectionPolicy> parse_injection_policy(std::string_view name);

/// Redistributes to a new total. Proportional scaling of an all-zero
/// distribution falls back to an equal split.
Vector inject_workload_change(const Vector& d_current, double dstar_new,
                              InjectionPolicy policy);

enum class InitialState {
  kOptimum,   // Tout = tsafe with the matching steady Tsup and D
  kExplicit,  // SimulationConfig::initial_state
};

struct SimulationConfig {
  double dt = 0.5;        // s
  double horizon = 0.0;   // s; 0 means the trace horizon
  InjectionPolicy injection = InjectionPolicy::kProportional;
  InitialState initial = InitialState::kOptimum;
  std::optional<SystemState> initial_state;
  int sample_stride = 1;
  /// An interval has settled when ||Tout - Tout_bar||_inf stays below the
  /// threshold from some step until the interval ends, for at least this many
  /// consecutive integration steps.
  double convergence_threshold = 0.05;  // degC
  int convergence_steps = 10;
};

/// Raised when the integrated state stops being finite.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& message, SystemState last_finite)
      : Error(ErrorCode::kDivergence, message), last_finite_(std::move(last_finite)) {}

  const SystemState& last_finite_state() const { return last_finite_; }

 private:
  SystemState last_finite_;
};

/// One classical Runge-Kutta step of the closed loop: the thermal model with
/// the supply temperature and workload controllers stacked into one state.
SystemState step(const DataCenterParams& p, const ControllerGains& g,
                 const SystemState& s, double dt);

struct Sample {
  SystemState state;
  double dstar = 0.0;
  double cost = 0.0;  // W; NaN when Tsup is outside the COP validity range
  LyapunovCertificate cert;
};

struct IntervalMetrics {
  std::size_t index = 0;
  double start = 0.0;
  double end = 0.0;
  double dstar = 0.0;
  /// Time from the interval start to the beginning of the final run of
  /// sub-threshold steps, if that run is long enough.
  std::optional<double> convergence_time;
  double max_deviation = 0.0;    // max ||Tout - Tout_bar||_inf, degC
  double settled_band = 0.0;     // same, over the settled run
  double initial_certificate = 0.0;
  double final_certificate = 0.0;
  /// Largest step-to-step increase of the certificate total, divided by the
  /// certificate at the start of the interval.
  double certificate_rise = 0.0;
  /// max |1^T D - D*| / D* over the interval.
  double conservation_error = 0.0;
  bool interior_violation = false;
  double mean_cost = 0.0;  // W
};

struct SimulationRecord {
  std::vector<Sample> samples;
  std::vector<OptimalSetpoint> setpoints;  // one per interval
  std::vector<IntervalMetrics> intervals;
  std::vector<std::string> warnings;
  InjectionPolicy injection = InjectionPolicy::kProportional;
  double dt = 0.0;
  int sample_stride = 1;
  std::size_t steps = 0;
  double max_deviation = 0.0;
};

/// Integrates the closed loop over the trace. Setpoints are solved per
/// interval before the run; at each interval boundary the workload is
/// redistributed by the injection policy and the controllers take over.
SimulationRecord run(const DataCenterParams& p, const WorkloadTrace& trace,
                     const SimulationConfig& config);

/// time_s, tout_1..n, tsup, d_1..n, dstar, cost_w, cert_v, cert_xi1,
/// cert_xi2, cert_total; 9 significant digits.
void write_csv(std::ostream& os, const SimulationRecord& record);

/// time_s, dstar; one row per interval.
void write_trace_csv(std::ostream& os, const WorkloadTrace& trace);

}  // namespace thermoptic
