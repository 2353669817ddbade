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

#include "thermoptic/params.hpp"

namespace thermoptic {

/// Per-rack electrical power P = V + W d, in W.
Vector rack_power(const DataCenterParams& p, const Vector& d);

/// Open-loop thermal matrix A = rho cp M^-1 (Gamma^T - I) F, with
/// M = diag(cp m). Entry (i, j) is rho (gamma_ji - delta_ij) f_j / m_i.
Matrix system_matrix_a(const DataCenterParams& p);

/// Workload input matrix B = M^-1 W = diag(w_i / (cp m_i)).
Matrix input_matrix_b(const DataCenterParams& p);

/// d/dt Tout = A (Tout - Tsup 1) + M^-1 P(d).
Vector thermal_derivative(const DataCenterParams& p, const SystemState& s);

/// Heat the CRAC removes, -1^T M A (Tout - Tsup 1), in W.
double heat_removed(const DataCenterParams& p, const SystemState& s);

/// Same quantity summed over the flows returning to the CRAC:
/// rho cp sum_i (1 - sum_j gamma_ij) f_i (Tout_i - Tsup).
double heat_removed_return_flow(const DataCenterParams& p, const SystemState& s);

/// CRAC electrical power Q_rem / COP(Tsup). Throws kOutOfRange when Tsup is
/// outside the COP validity interval.
double crac_power(const DataCenterParams& p, const SystemState& s);
double crac_power(const CopCurve& cop, double heat_removed_w, double tsup);

/// Facility power: CRAC power plus the sum of rack power.
double total_cost(const DataCenterParams& p, const SystemState& s);

/// Facility power at a steady state, (1 + 1/COP(Tsup)) 1^T P(d).
double reduced_cost(const DataCenterParams& p, double tsup, const Vector& d);

}  // namespace thermoptic
