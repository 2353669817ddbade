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

#include <span>
#include <vector>

#include "thermoptic/params.hpp"
#include "thermoptic/steady_state.hpp"

namespace thermoptic {

/// Energy-optimal steady operating point together with its KKT multipliers.
///
/// For homogeneous racks minimizing facility power reduces to
///
///   max c1^T Tout   s.t.   0 <= c3 Tout + c4(D*) <= dmax,   Tout <= tsafe,
///
/// whose stationarity condition reads -c1 + mu + c3^T (mu_plus - mu_minus) = 0.
struct OptimalSetpoint {
  Vector tout_bar;
  double tsup_bar = 0.0;
  Vector d_bar;
  Vector mu;        // temperature-bound multipliers
  Vector mu_plus;   // workload upper-bound multipliers
  Vector mu_minus;  // workload lower-bound multipliers
  std::vector<int> active_set;        // racks with d_bar == dmax
  std::vector<int> lower_active_set;  // racks with d_bar == 0
  double objective = 0.0;             // c1^T tout_bar
  double cost = 0.0;                  // facility power at the setpoint, W
  bool degenerate = false;            // D* == 0 or D* == capacity
  int iterations = 0;
};

/// Candidate with every workload constraint inactive: tout_bar = tsafe,
/// mu = c1, mu_plus = mu_minus = 0. The caller must still confirm that
/// 0 < c3 tsafe + c4(D*) < dmax.
OptimalSetpoint kkt_inactive_solution(const SteadyStateConstants& k,
                                      const Vector& tsafe, double dstar);

/// Candidate in which the racks in `active` run at full capacity and every
/// other rack sits at its safe temperature. The active outlet temperatures
/// solve the active rows of c3 Tout + c4(D*) = dmax; mu_plus solves the
/// active block of the stationarity condition with mu = 0 there.
///
/// Throws kInvalidArgument when `active` is empty or covers every rack and
/// kDegenerate when the active block of c3 is singular. A negative mu_plus
/// entry or tout_bar above tsafe means the active set is wrong; check_kkt
/// exposes both.
OptimalSetpoint kkt_partially_active_solution(const SteadyStateConstants& k,
                                              const DataCenterParams& p,
                                              double dstar,
                                              std::span<const int> active);

/// Solves the reduced problem for homogeneous racks.
///
/// Tries the all-inactive candidate first. If a workload bound is violated,
/// bounds are activated one at a time (most violated first) and released when
/// their multiplier would turn negative, which is a dual simplex over the
/// 3n bound constraints starting from the dual-feasible basis Tout = tsafe.
///
/// Throws kHeterogeneous for heterogeneous racks, kInfeasible when D* is
/// outside [0, capacity], kNonConvergence after 2n pivots.
OptimalSetpoint solve_reduced(const DataCenterParams& p,
                              const SteadyStateConstants& k, double dstar);

struct KktReport {
  double stationarity = 0.0;       // ||-c1 + mu + c3^T (mu+ - mu-)||_inf
  double workload_bounds = 0.0;    // worst violation of 0 <= d <= dmax
  double temperature_bound = 0.0;  // worst violation of tout <= tsafe
  double total_workload = 0.0;     // |1^T d - D*|
  double slack_upper = 0.0;        // |mu+^T (d - dmax)|
  double slack_lower = 0.0;        // |mu-^T d|
  double slack_temperature = 0.0;  // |mu^T (tout - tsafe)|
  double multiplier_sign = 0.0;    // max(0, -min multiplier)
  double tolerance = 1e-8;
  bool pass = false;

  double max_residual() const;
};

KktReport check_kkt(const OptimalSetpoint& s, const SteadyStateConstants& k,
                    const DataCenterParams& p, double dstar,
                    double tolerance = 1e-8);

/// Exact optimum by vertex enumeration: every n-subset of the 3n bound
/// constraints is solved as an equality system and the best feasible vertex
/// is kept. Only the primal fields are filled. Limited to n <= 6.
OptimalSetpoint brute_force_oracle(const SteadyStateConstants& k,
                                   const DataCenterParams& p, double dstar);

}  // namespace thermoptic
