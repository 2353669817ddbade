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

#include "thermoptic/optimizer.hpp"
#include "thermoptic/params.hpp"

namespace thermoptic {

struct LyapunovSolution {
  Matrix z;
  double residual = 0.0;  // ||A^T Z + Z A + 2 I||_inf
  /// min |conj(lambda_i) + lambda_j| / (2 ||A||_inf), a cheap proxy for the
  /// reciprocal condition of the Lyapunov operator.
  double rcond = 0.0;
  bool ill_conditioned = false;
};

/// Solves A^T Z + Z A = -2 I for symmetric positive definite Z with the
/// Bartels-Stewart method on the complex Schur form of A, O(n^3). Throws
/// kNotHurwitz when A has an eigenvalue with nonnegative real part.
LyapunovSolution solve_lyapunov(const Matrix& a);

/// Matrices the feedback laws need, fixed for a parameter set.
struct ControllerGains {
  Matrix z;
  Matrix a;
  Matrix b;
  Vector tsafe;
  Vector tsup_gain;      // (1^T A^T Z)^T
  Matrix workload_gain;  // B^T Z
  double lyapunov_residual = 0.0;
  bool ill_conditioned = false;
};

ControllerGains make_controller_gains(const DataCenterParams& p);

/// Supply temperature rate 1^T A^T Z (Tout - Tsafe).
double tsup_derivative(const ControllerGains& g, const Vector& tout);

/// Workload redistribution rate (1 1^T / n - I) B^T Z (Tout - Tsafe). The
/// projector annihilates 1, so the total workload is left unchanged.
Vector workload_derivative(const ControllerGains& g, const Vector& tout);

struct LyapunovCertificate {
  double v = 0.0;    // 1/2 dT^T Z dT
  double xi1 = 0.0;  // 1/2 dTsup^2
  double xi2 = 0.0;  // 1/2 ||dD||^2
  double total = 0.0;
  double dissipation = 0.0;  // -||dT||^2, the time derivative of total
};

/// Storage functions evaluated on deviations from the setpoint.
LyapunovCertificate certificate(const ControllerGains& g, const SystemState& s,
                                const OptimalSetpoint& setpoint);

}  // namespace thermoptic
