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

#include <string>

#include "thermoptic/params.hpp"

namespace thermoptic {

/// Closed-form steady-state maps of a data center.
///
/// At any steady state with total workload D*, the supply temperature and the
/// workload distribution are affine functions of the rack outlet temperatures:
///
///   Tsup = c1^T Tout + c2(D*)
///   D    = c3 Tout + c4(D*)
///
/// with c2(D*) = (D* + 1^T W^-1 V) / (1^T W^-1 M A 1) and c4 affine in D*.
/// The maps satisfy c1^T 1 = 1, 1^T c3 = 0, c3 1 = 0 and 1^T c4(D*) = D*.
struct SteadyStateConstants {
  Vector c1;
  /// 1^T W^-1 V, the numerator offset of c2.
  double c2_offset = 0.0;
  /// 1^T W^-1 M A 1; strictly negative for valid parameters.
  double c2_denominator = 0.0;
  Matrix c3;
  Vector c4_gain;
  Vector c4_offset;
  /// ||W^-1 M A||_inf, used to normalize identity residuals.
  double scale = 1.0;
  bool homogeneous = false;

  std::size_t size() const { return static_cast<std::size_t>(c1.size()); }
  double c2(double dstar) const { return (dstar + c2_offset) / c2_denominator; }
  Vector c4(double dstar) const { return c4_gain * dstar + c4_offset; }
};

/// Throws kDegenerate when |1^T W^-1 M A 1| is numerically zero.
SteadyStateConstants compute_constants(const DataCenterParams& p);

double steady_supply_temperature(const SteadyStateConstants& k,
                                 const Vector& tout, double dstar);

Vector steady_workload_distribution(const SteadyStateConstants& k,
                                    const Vector& tout, double dstar);

/// The full steady state (Tout, Tsup, D) implied by an outlet temperature
/// profile and a total workload.
SystemState steady_state(const SteadyStateConstants& k, const Vector& tout,
                         double dstar);

struct IdentityReport {
  double c1_sum = 0.0;       // |c1^T 1 - 1|
  double c3_columns = 0.0;   // ||1^T c3||_inf / scale
  double c3_rows = 0.0;      // ||c3 1||_inf / scale
  double c4_sum = 0.0;       // |1^T c4(D*) - D*| / max(1, D*)
  double tolerance = 1e-9;
  bool pass = false;
};

IdentityReport check_identities(const SteadyStateConstants& k, double dstar,
                                double tolerance = 1e-9);

enum class C3Status {
  kProved,               // homogeneous racks, n >= 2
  kDegenerateSingleRack, // n == 1, c3 == [0]
  kOutsideAssumptions,   // heterogeneous racks, sign pattern not guaranteed
};

std::string to_string(C3Status status);

struct C3StructureReport {
  std::size_t n = 0;
  double min_diagonal = 0.0;
  double max_off_diagonal = 0.0;
  C3Status status = C3Status::kProved;
  bool pass = false;
};

/// Checks that c3 has a strictly positive diagonal and strictly negative
/// off-diagonal entries. A single rack passes vacuously.
C3StructureReport verify_c3_structure(const SteadyStateConstants& k);

struct HurwitzReport {
  /// min_i (|A_ii| - sum_{j != i} |A_ij|).
  double dominance_margin = 0.0;
  double max_diagonal = 0.0;
  /// Rightmost Gershgorin disc edge, max_i (A_ii + sum_{j != i} |A_ij|).
  double gershgorin_bound = 0.0;
  double max_eigen_real = 0.0;
  bool eigen_converged = false;
  bool pass = false;
};

/// Certifies that A is Hurwitz: strict row diagonal dominance with a negative
/// diagonal places every Gershgorin disc in the open left half-plane. The
/// eigenvalue computation is a cross-check; if it fails to converge the
/// dominance test decides.
HurwitzReport verify_a_hurwitz(const DataCenterParams& p);
HurwitzReport verify_hurwitz(const Matrix& a);

}  // namespace thermoptic
