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

#include "thermoptic/model.hpp"

#include <fmt/format.h>

#include "thermoptic/error.hpp"

namespace thermoptic {

namespace {

void require_length(const char* what, const Vector& x, Eigen::Index n) {
  if (x.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} has length {}, expected {}", what, x.size(), n));
  }
}

}  // namespace

Vector rack_power(const DataCenterParams& p, const Vector& d) {
  require_length("workload", d, p.v.size());
  return p.v + p.w.cwiseProduct(d);
}

Matrix system_matrix_a(const DataCenterParams& p) {
  const auto n = p.v.size();
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double delta = (i == j) ? 1.0 : 0.0;
      a(i, j) = p.rho * (p.gamma(j, i) - delta) * p.flow(j) / p.mass(i);
    }
  }
  return a;
}

Matrix input_matrix_b(const DataCenterParams& p) {
  return (p.w.array() / (p.cp * p.mass.array())).matrix().asDiagonal();
}

Vector thermal_derivative(const DataCenterParams& p, const SystemState& s) {
  require_length("tout", s.tout, p.v.size());
  const Vector heating =
      rack_power(p, s.d).cwiseQuotient(p.cp * p.mass);
  return system_matrix_a(p) * (s.tout.array() - s.tsup).matrix() + heating;
}

double heat_removed(const DataCenterParams& p, const SystemState& s) {
  require_length("tout", s.tout, p.v.size());
  const Matrix ma = (p.cp * p.mass).asDiagonal() * system_matrix_a(p);
  return -(ma.colwise().sum() * (s.tout.array() - s.tsup).matrix())(0);
}

double heat_removed_return_flow(const DataCenterParams& p, const SystemState& s) {
  require_length("tout", s.tout, p.v.size());
  double q = 0.0;
  for (Eigen::Index i = 0; i < p.gamma.rows(); ++i) {
    const double returned = (1.0 - p.gamma.row(i).sum()) * p.flow(i);
    q += returned * (s.tout(i) - s.tsup);
  }
  return p.rho * p.cp * q;
}

double crac_power(const CopCurve& cop, double heat_removed_w, double tsup) {
  return heat_removed_w / cop(tsup);
}

double crac_power(const DataCenterParams& p, const SystemState& s) {
  return crac_power(p.cop, heat_removed(p, s), s.tsup);
}

double total_cost(const DataCenterParams& p, const SystemState& s) {
  return crac_power(p, s) + rack_power(p, s.d).sum();
}

double reduced_cost(const DataCenterParams& p, double tsup, const Vector& d) {
  return (1.0 + 1.0 / p.cop(tsup)) * rack_power(p, d).sum();
}

}  // namespace thermoptic
