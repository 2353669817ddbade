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

#include "thermoptic/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "thermoptic/error.hpp"
#include "thermoptic/model.hpp"

namespace thermoptic {

SteadyStateConstants compute_constants(const DataCenterParams& p) {
  const auto n = p.v.size();
  if (n < 1 || p.w.size() != n || p.gamma.rows() != n || p.gamma.cols() != n ||
      p.mass.size() != n || p.flow.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "compute_constants: inconsistent parameter dimensions");
  }

  // alpha = W^-1 M A; W and M are diagonal so this is a row scaling of A.
  const Vector row_scale = (p.cp * p.mass).cwiseQuotient(p.w);
  const Matrix alpha = row_scale.asDiagonal() * system_matrix_a(p);
  const Vector alpha_ones = alpha.rowwise().sum();
  const double denominator = alpha_ones.sum();

  SteadyStateConstants k;
  k.scale = alpha.cwiseAbs().rowwise().sum().maxCoeff();
  if (!(std::abs(denominator) > 1e-12 * k.scale) || !std::isfinite(denominator)) {
    throw Error(ErrorCode::kDegenerate,
                fmt::format("1^T W^-1 M A 1 = {} is numerically zero", denominator));
  }

  const Vector w_inv_v = p.v.cwiseQuotient(p.w);
  k.c1 = alpha.colwise().sum().transpose() / denominator;
  k.c2_offset = w_inv_v.sum();
  k.c2_denominator = denominator;
  k.c3 = -alpha + alpha_ones * k.c1.transpose();
  k.c4_gain = alpha_ones / denominator;
  k.c4_offset = alpha_ones * (k.c2_offset / denominator) - w_inv_v;
  k.homogeneous = is_homogeneous(p);
  return k;
}

double steady_supply_temperature(const SteadyStateConstants& k,
                                 const Vector& tout, double dstar) {
  if (tout.size() != k.c1.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "tout length does not match constants");
  }
  return k.c1.dot(tout) + k.c2(dstar);
}

Vector steady_workload_distribution(const SteadyStateConstants& k,
                                    const Vector& tout, double dstar) {
  if (tout.size() != k.c1.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "tout length does not match constants");
  }
  return k.c3 * tout + k.c4(dstar);
}

SystemState steady_state(const SteadyStateConstants& k, const Vector& tout,
                         double dstar) {
  SystemState s;
  s.tout = tout;
  s.tsup = steady_supply_temperature(k, tout, dstar);
  s.d = steady_workload_distribution(k, tout, dstar);
  return s;
}

IdentityReport check_identities(const SteadyStateConstants& k, double dstar,
                                double tolerance) {
  IdentityReport r;
  r.tolerance = tolerance;
  const double scale = std::max(k.scale, std::numeric_limits<double>::min());
  r.c1_sum = std::abs(k.c1.sum() - 1.0);
  r.c3_columns = k.c3.colwise().sum().cwiseAbs().maxCoeff() / scale;
  r.c3_rows = k.c3.rowwise().sum().cwiseAbs().maxCoeff() / scale;
  r.c4_sum = std::abs(k.c4(dstar).sum() - dstar) / std::max(1.0, std::abs(dstar));
  r.pass = r.c1_sum <= tolerance && r.c3_columns <= tolerance &&
           r.c3_rows <= tolerance && r.c4_sum <= tolerance;
  return r;
}

std::string to_string(C3Status status) {
  switch (status) {
    case C3Status::kProved: return "proved regime (homogeneous racks)";
    case C3Status::kDegenerateSingleRack: return "degenerate n=1";
    case C3Status::kOutsideAssumptions: return "outside proof's assumptions (heterogeneous racks)";
  }
  return "unknown";
}

C3StructureReport verify_c3_structure(const SteadyStateConstants& k) {
  C3StructureReport r;
  r.n = k.size();
  r.min_diagonal = k.c3.diagonal().minCoeff();
  if (r.n == 1) {
    r.max_off_diagonal = 0.0;
    r.status = C3Status::kDegenerateSingleRack;
    r.pass = true;
    return r;
  }
  r.max_off_diagonal = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < k.c3.rows(); ++i) {
    for (Eigen::Index j = 0; j < k.c3.cols(); ++j) {
      if (i != j) r.max_off_diagonal = std::max(r.max_off_diagonal, k.c3(i, j));
    }
  }
  r.status = k.homogeneous ? C3Status::kProved : C3Status::kOutsideAssumptions;
  r.pass = r.min_diagonal > 0.0 && r.max_off_diagonal < 0.0;
  return r;
}

HurwitzReport verify_hurwitz(const Matrix& a) {
  HurwitzReport r;
  r.dominance_margin = std::numeric_limits<double>::infinity();
  r.max_diagonal = -std::numeric_limits<double>::infinity();
  r.gershgorin_bound = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    const double radius = a.row(i).cwiseAbs().sum() - std::abs(a(i, i));
    r.dominance_margin = std::min(r.dominance_margin, std::abs(a(i, i)) - radius);
    r.max_diagonal = std::max(r.max_diagonal, a(i, i));
    r.gershgorin_bound = std::max(r.gershgorin_bound, a(i, i) + radius);
  }

  Eigen::EigenSolver<Matrix> solver(a, /*computeEigenvectors=*/false);
  r.eigen_converged = solver.info() == Eigen::Success;
  r.max_eigen_real = r.eigen_converged
                         ? solver.eigenvalues().real().maxCoeff()
                         : std::numeric_limits<double>::quiet_NaN();

  const bool dominance = r.dominance_margin > 0.0 && r.max_diagonal < 0.0;
  r.pass = dominance && (!r.eigen_converged || r.max_eigen_real < 0.0);
  return r;
}

HurwitzReport verify_a_hurwitz(const DataCenterParams& p) {
  return verify_hurwitz(system_matrix_a(p));
}

}  // namespace thermoptic
