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

#include "thermoptic/params.hpp"

#include <cmath>
#include <string>

#include <fmt/format.h>

#include "thermoptic/error.hpp"

namespace thermoptic {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kOutOfRange: return "out of range";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kInfeasible: return "infeasible";
    case ErrorCode::kHeterogeneous: return "heterogeneous racks";
    case ErrorCode::kNotHurwitz: return "not Hurwitz";
    case ErrorCode::kNonConvergence: return "non-convergence";
    case ErrorCode::kSizeLimit: return "size limit";
    case ErrorCode::kDivergence: return "divergence";
  }
  return "unknown";
}

CopCurve::CopCurve()
    : CopCurve(kDefaultA, kDefaultB, kDefaultC, kDefaultLo, kDefaultHi) {}

CopCurve::CopCurve(double a, double b, double c, double t_lo, double t_hi)
    : a_(a), b_(b), c_(c), t_lo_(t_lo), t_hi_(t_hi) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) ||
      !std::isfinite(t_lo) || !std::isfinite(t_hi)) {
    throw Error(ErrorCode::kInvalidArgument, "COP curve: non-finite coefficient");
  }
  if (!(t_lo < t_hi)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("COP curve: empty validity interval [{}, {}]", t_lo, t_hi));
  }
  constexpr int kGrid = 64;
  for (int k = 0; k <= kGrid; ++k) {
    const double t = t_lo + (t_hi - t_lo) * k / kGrid;
    if (!(2.0 * a * t + b > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("COP curve is not strictly increasing at T={}", t));
    }
  }
  if (!(evaluate(t_lo) > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("COP curve is not positive at T={}", t_lo));
  }
}

double CopCurve::operator()(double t) const {
  if (!in_range(t)) {
    throw Error(ErrorCode::kOutOfRange,
                fmt::format("supply temperature {} outside COP validity [{}, {}]",
                            t, t_lo_, t_hi_));
  }
  return evaluate(t);
}

DataCenterParams make_homogeneous_params(const Matrix& gamma, double flow,
                                         double mass, double v, double w,
                                         double dmax, double tsafe,
                                         const CopCurve& cop) {
  const auto n = gamma.rows();
  DataCenterParams p;
  p.gamma = gamma;
  p.flow = Vector::Constant(n, flow);
  p.mass = Vector::Constant(n, mass);
  p.v = Vector::Constant(n, v);
  p.w = Vector::Constant(n, w);
  p.dmax = Vector::Constant(n, dmax);
  p.tsafe = Vector::Constant(n, tsafe);
  p.cop = cop;
  return p;
}

namespace {

void check_positive(const char* name, const Vector& x,
                    std::vector<Violation>& out) {
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (!(x(i) > 0.0) || !std::isfinite(x(i))) {
      out.push_back({name, static_cast<int>(i), -1, x(i),
                     fmt::format("{} not strictly positive at index {} (value {})",
                                 name, i, x(i))});
    }
  }
}

}  // namespace

std::vector<Violation> validate_params(const DataCenterParams& p) {
  std::vector<Violation> out;
  const auto n = p.v.size();
  if (n < 1) {
    out.push_back({"n", -1, -1, 0.0, "at least one rack is required"});
    return out;
  }

  bool shapes_ok = true;
  auto check_len = [&](const char* name, const Vector& x) {
    if (x.size() != n) {
      out.push_back({name, -1, -1, static_cast<double>(x.size()),
                     fmt::format("{} has length {}, expected {}", name, x.size(), n)});
      shapes_ok = false;
    }
  };
  check_len("flow", p.flow);
  check_len("mass", p.mass);
  check_len("w", p.w);
  check_len("dmax", p.dmax);
  check_len("tsafe", p.tsafe);
  if (p.gamma.rows() != n || p.gamma.cols() != n) {
    out.push_back({"gamma", -1, -1, static_cast<double>(p.gamma.rows()),
                   fmt::format("gamma is {}x{}, expected {}x{}", p.gamma.rows(),
                               p.gamma.cols(), n, n)});
    shapes_ok = false;
  }
  if (!shapes_ok) return out;

  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double g = p.gamma(i, j);
      if (!(g > 0.0 && g < 1.0)) {
        out.push_back({"gamma", static_cast<int>(i), static_cast<int>(j), g,
                       fmt::format("gamma({},{}) = {} not in (0,1)", i, j, g)});
      }
    }
    const double row_sum = p.gamma.row(i).sum();
    if (!(row_sum < 1.0)) {
      out.push_back({"gamma", static_cast<int>(i), -1, row_sum,
                     fmt::format("gamma row {} sum {} not < 1", i, row_sum)});
    }
  }

  check_positive("flow", p.flow, out);
  check_positive("mass", p.mass, out);
  check_positive("v", p.v, out);
  check_positive("w", p.w, out);
  check_positive("dmax", p.dmax, out);
  check_positive("tsafe", p.tsafe, out);
  if (!(p.rho > 0.0) || !std::isfinite(p.rho)) {
    out.push_back({"rho", -1, -1, p.rho, "rho not strictly positive"});
  }
  if (!(p.cp > 0.0) || !std::isfinite(p.cp)) {
    out.push_back({"cp", -1, -1, p.cp, "cp not strictly positive"});
  }

  // Air reaching rack i from the CRAC: f_i - sum_j gamma_ji f_j must be
  // positive, otherwise the rack is fed entirely by recirculated exhaust.
  const Vector recirculated_in = p.gamma.transpose() * p.flow;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double supply = p.flow(i) - recirculated_in(i);
    if (!(supply > 0.0)) {
      out.push_back({"gamma", -1, static_cast<int>(i), supply,
                     fmt::format("CRAC supply flow into rack {} is {} (not > 0)",
                                 i, supply)});
    }
  }
  return out;
}

bool is_homogeneous(const DataCenterParams& p) {
  if (p.v.size() == 0) return true;
  const double v0 = p.v(0);
  const double w0 = p.w(0);
  for (Eigen::Index i = 1; i < p.v.size(); ++i) {
    if (std::abs(p.v(i) - v0) > 1e-12 * std::abs(v0) ||
        std::abs(p.w(i) - w0) > 1e-12 * std::abs(w0)) {
      return false;
    }
  }
  return true;
}

void require_valid(const DataCenterParams& p) {
  const auto violations = validate_params(p);
  if (!violations.empty()) {
    throw Error(ErrorCode::kInvalidArgument,
                "invalid data center parameters: " + violations.front().message);
  }
}

}  // namespace thermoptic
