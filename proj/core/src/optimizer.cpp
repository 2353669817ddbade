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

#include "thermoptic/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "thermoptic/error.hpp"
#include "thermoptic/model.hpp"

namespace thermoptic {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Relative slack below which a workload bound counts as binding.
constexpr double kBoundTolerance = 1e-9;

void require_dims(const SteadyStateConstants& k, const DataCenterParams& p) {
  const auto n = k.c1.size();
  if (p.dmax.size() != n || p.tsafe.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "optimizer: constants and parameters have different rack counts");
  }
}

void require_dstar(const DataCenterParams& p, double dstar) {
  if (!(dstar >= 0.0) || dstar > p.capacity()) {
    throw Error(ErrorCode::kInfeasible,
                fmt::format("total workload {} CPU outside [0, {}] (data center capacity)",
                            dstar, p.capacity()));
  }
}

// Fills tsup, objective, cost and the active sets from tout_bar and d_bar.
void finalize(OptimalSetpoint& s, const SteadyStateConstants& k,
              const DataCenterParams* p, double dstar) {
  s.tsup_bar = steady_supply_temperature(k, s.tout_bar, dstar);
  s.objective = k.c1.dot(s.tout_bar);
  s.cost = kNaN;
  if (p == nullptr) return;

  s.active_set.clear();
  s.lower_active_set.clear();
  for (Eigen::Index i = 0; i < s.d_bar.size(); ++i) {
    const double tol = kBoundTolerance * p->dmax(i);
    if (std::abs(s.d_bar(i) - p->dmax(i)) <= tol) {
      s.active_set.push_back(static_cast<int>(i));
    } else if (std::abs(s.d_bar(i)) <= tol) {
      s.lower_active_set.push_back(static_cast<int>(i));
    }
  }
  s.degenerate = dstar == 0.0 || dstar == p->capacity();
  if (p->cop.in_range(s.tsup_bar)) {
    SystemState state{s.tout_bar, s.tsup_bar, s.d_bar, 0.0};
    s.cost = total_cost(*p, state);
  }
}

// Bound constraints of the reduced problem, written as a_k^T Tout <= b_k:
//   k in [0, n):   Tout_k <= tsafe_k
//   k in [n, 2n):  (c3 Tout)_i <= dmax_i - c4_i       (i = k - n)
//   k in [2n, 3n): -(c3 Tout)_i <= c4_i               (i = k - 2n)
class BoundSystem {
 public:
  BoundSystem(const SteadyStateConstants& k, const DataCenterParams& p,
              double dstar)
      : k_(k), p_(p), c4_(k.c4(dstar)), n_(k.c1.size()) {}

  Eigen::Index n() const { return n_; }
  Eigen::Index count() const { return 3 * n_; }

  Vector row(Eigen::Index id) const {
    if (id < n_) return Vector::Unit(n_, id);
    if (id < 2 * n_) return k_.c3.row(id - n_).transpose();
    return -k_.c3.row(id - 2 * n_).transpose();
  }

  double rhs(Eigen::Index id) const {
    if (id < n_) return p_.tsafe(id);
    if (id < 2 * n_) return p_.dmax(id - n_) - c4_(id - n_);
    return c4_(id - 2 * n_);
  }

  // Violation a_k^T x - b_k; positive means infeasible.
  double violation(Eigen::Index id, const Vector& x) const {
    return row(id).dot(x) - rhs(id);
  }

  double tolerance(Eigen::Index id) const {
    if (id < n_) return kBoundTolerance * std::max(1.0, std::abs(p_.tsafe(id)));
    return kBoundTolerance * p_.dmax(id % n_);
  }

  Matrix basis_matrix(std::span<const Eigen::Index> basis) const {
    Matrix m(n_, n_);
    for (Eigen::Index r = 0; r < n_; ++r) m.row(r) = row(basis[r]).transpose();
    return m;
  }

 private:
  const SteadyStateConstants& k_;
  const DataCenterParams& p_;
  Vector c4_;
  Eigen::Index n_;
};

// Vertex defined by a basis. Temperature bounds in the basis are pinned to
// tsafe exactly; the remaining outlet temperatures solve the workload rows.
Vector basis_point(const BoundSystem& sys, const DataCenterParams& p,
                   std::span<const Eigen::Index> basis) {
  const auto n = sys.n();
  std::vector<bool> pinned(n, false);
  std::vector<Eigen::Index> rows;
  for (const auto id : basis) {
    if (id < n) {
      pinned[id] = true;
    } else {
      rows.push_back(id);
    }
  }
  Vector x = p.tsafe;
  std::vector<Eigen::Index> free;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!pinned[i]) free.push_back(i);
  }
  if (free.empty()) return x;
  if (free.size() != rows.size()) {
    throw Error(ErrorCode::kDegenerate, "basis does not determine a vertex");
  }
  const auto m = static_cast<Eigen::Index>(free.size());
  Matrix lhs(m, m);
  Vector rhs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Vector a = sys.row(rows[r]);
    double fixed = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (pinned[i]) fixed += a(i) * p.tsafe(i);
    }
    for (Eigen::Index c = 0; c < m; ++c) lhs(r, c) = a(free[c]);
    rhs(r) = sys.rhs(rows[r]) - fixed;
  }
  Eigen::FullPivLU<Matrix> lu(lhs);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kDegenerate, "singular workload block in active set");
  }
  const Vector xf = lu.solve(rhs);
  for (Eigen::Index c = 0; c < m; ++c) x(free[c]) = xf(c);
  return x;
}

std::vector<int> sorted_unique(std::span<const int> idx) {
  std::vector<int> out(idx.begin(), idx.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

double KktReport::max_residual() const {
  return std::max({stationarity, workload_bounds, temperature_bound,
                   total_workload, slack_upper, slack_lower, slack_temperature,
                   multiplier_sign});
}

OptimalSetpoint kkt_inactive_solution(const SteadyStateConstants& k,
                                      const Vector& tsafe, double dstar) {
  const auto n = k.c1.size();
  if (tsafe.size() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "tsafe length does not match constants");
  }
  OptimalSetpoint s;
  s.tout_bar = tsafe;
  s.d_bar = steady_workload_distribution(k, tsafe, dstar);
  s.mu = k.c1;
  s.mu_plus = Vector::Zero(n);
  s.mu_minus = Vector::Zero(n);
  finalize(s, k, nullptr, dstar);
  return s;
}

OptimalSetpoint kkt_partially_active_solution(const SteadyStateConstants& k,
                                              const DataCenterParams& p,
                                              double dstar,
                                              std::span<const int> active) {
  require_dims(k, p);
  const auto n = static_cast<int>(k.c1.size());
  const auto act = sorted_unique(active);
  if (act.empty() || static_cast<int>(act.size()) >= n) {
    throw Error(ErrorCode::kInvalidArgument,
                "active set must be a nonempty strict subset of the racks");
  }
  if (act.front() < 0 || act.back() >= n) {
    throw Error(ErrorCode::kInvalidArgument, "active rack index out of range");
  }
  std::vector<int> inact;
  for (int i = 0, a = 0; i < n; ++i) {
    if (a < static_cast<int>(act.size()) && act[a] == i) {
      ++a;
    } else {
      inact.push_back(i);
    }
  }

  const auto m = static_cast<Eigen::Index>(act.size());
  const Vector c4 = k.c4(dstar);
  Matrix block(m, m);
  Vector rhs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const int i = act[r];
    for (Eigen::Index c = 0; c < m; ++c) block(r, c) = k.c3(i, act[c]);
    double coupling = 0.0;
    for (const int j : inact) coupling += k.c3(i, j) * p.tsafe(j);
    rhs(r) = p.dmax(i) - c4(i) - coupling;
  }
  Eigen::FullPivLU<Matrix> lu(block);
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::kDegenerate, "active block of c3 is singular");
  }
  const Vector tout_active = lu.solve(rhs);

  Vector c1_active(m);
  for (Eigen::Index r = 0; r < m; ++r) c1_active(r) = k.c1(act[r]);
  const Vector mu_plus_active = lu.transpose().solve(c1_active);

  OptimalSetpoint s;
  s.tout_bar = p.tsafe;
  s.mu_plus = Vector::Zero(n);
  for (Eigen::Index r = 0; r < m; ++r) {
    s.tout_bar(act[r]) = tout_active(r);
    s.mu_plus(act[r]) = mu_plus_active(r);
  }
  s.mu_minus = Vector::Zero(n);
  s.mu = k.c1 - k.c3.transpose() * s.mu_plus;
  for (const int i : act) s.mu(i) = 0.0;
  s.d_bar = k.c3 * s.tout_bar + c4;
  for (const int i : act) s.d_bar(i) = p.dmax(i);
  finalize(s, k, &p, dstar);
  return s;
}

OptimalSetpoint solve_reduced(const DataCenterParams& p,
                              const SteadyStateConstants& k, double dstar) {
  require_dims(k, p);
  if (!is_homogeneous(p)) {
    throw Error(ErrorCode::kHeterogeneous,
                "setpoint optimization requires homogeneous racks: only when every "
                "rack has the same idle power v and per-CPU power w does total "
                "compute power depend on D* alone, so that minimizing facility "
                "power reduces to maximizing the supply temperature");
  }
  require_dstar(p, dstar);
  if (!(k.c1.minCoeff() > 0.0)) {
    throw Error(ErrorCode::kDegenerate, "c1 is not strictly positive");
  }

  const auto n = k.c1.size();

  // All workload constraints inactive: tout_bar = tsafe.
  OptimalSetpoint inactive = kkt_inactive_solution(k, p.tsafe, dstar);
  bool interior = true;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double tol = kBoundTolerance * p.dmax(i);
    if (!(inactive.d_bar(i) > tol && inactive.d_bar(i) < p.dmax(i) - tol)) {
      interior = false;
      break;
    }
  }
  if (interior) {
    finalize(inactive, k, &p, dstar);
    return inactive;
  }

  // Dual simplex from the basis {Tout <= tsafe}, which is dual feasible
  // because c1 > 0.
  const BoundSystem sys(k, p, dstar);
  std::vector<Eigen::Index> basis(n);
  std::iota(basis.begin(), basis.end(), Eigen::Index{0});
  const Eigen::Index max_pivots = 2 * n;
  Eigen::Index pivots = 0;
  Vector x;
  Vector y;
  while (true) {
    x = basis_point(sys, p, basis);
    const Matrix ab = sys.basis_matrix(basis);
    Eigen::FullPivLU<Matrix> lu(ab);
    if (!lu.isInvertible()) {
      throw Error(ErrorCode::kDegenerate, "active-set basis became singular");
    }
    y = lu.transpose().solve(k.c1);

    std::vector<bool> in_basis(sys.count(), false);
    for (const auto id : basis) in_basis[id] = true;
    Eigen::Index entering = -1;
    double worst = 0.0;
    for (Eigen::Index id = 0; id < sys.count(); ++id) {
      if (in_basis[id]) continue;
      const double viol = sys.violation(id, x);
      if (viol > sys.tolerance(id) && viol > worst) {
        worst = viol;
        entering = id;
      }
    }
    if (entering < 0) break;

    if (pivots >= max_pivots) {
      throw Error(ErrorCode::kNonConvergence,
                  fmt::format("active-set search exceeded {} iterations at D*={}",
                              max_pivots, dstar));
    }

    // Entering with dual weight t moves the basis duals along -u; the first
    // one to reach zero leaves.
    const Vector u = lu.transpose().solve(sys.row(entering));
    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    const double u_tol = 1e-12 * std::max(1.0, u.cwiseAbs().maxCoeff());
    for (Eigen::Index r = 0; r < n; ++r) {
      if (u(r) <= u_tol) continue;
      const double ratio = std::max(0.0, y(r)) / u(r);
      const bool better = ratio < best_ratio * (1.0 - 1e-12);
      const bool tie = !better && ratio <= best_ratio * (1.0 + 1e-12) &&
                       leave >= 0 && basis[r] < basis[leave];
      if (better || tie) {
        best_ratio = ratio;
        leave = r;
      }
    }
    if (leave < 0) {
      throw Error(ErrorCode::kInfeasible,
                  fmt::format("no feasible workload distribution for D*={}", dstar));
    }
    basis[leave] = entering;
    ++pivots;
  }

  // Collect the basis by role.
  std::vector<int> upper;
  std::vector<int> lower;
  std::vector<bool> pinned(n, false);
  Vector mu = Vector::Zero(n);
  Vector mu_plus = Vector::Zero(n);
  Vector mu_minus = Vector::Zero(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const auto id = basis[r];
    if (id < n) {
      pinned[id] = true;
      mu(id) = y(r);
    } else if (id < 2 * n) {
      upper.push_back(static_cast<int>(id - n));
      mu_plus(id - n) = y(r);
    } else {
      lower.push_back(static_cast<int>(id - 2 * n));
      mu_minus(id - 2 * n) = y(r);
    }
  }
  std::sort(upper.begin(), upper.end());

  // When only upper bounds bind and each binding rack owns its free outlet
  // temperature, the closed-form partially active characterization applies.
  bool paired = lower.empty() && !upper.empty();
  for (const int i : upper) paired = paired && !pinned[i];
  if (paired) {
    OptimalSetpoint s = kkt_partially_active_solution(k, p, dstar, upper);
    s.iterations = static_cast<int>(pivots);
    return s;
  }

  OptimalSetpoint s;
  s.tout_bar = x;
  s.d_bar = k.c3 * x + k.c4(dstar);
  for (const int i : upper) s.d_bar(i) = p.dmax(i);
  for (const int i : lower) s.d_bar(i) = 0.0;
  s.mu = mu;
  s.mu_plus = mu_plus;
  s.mu_minus = mu_minus;
  s.iterations = static_cast<int>(pivots);
  finalize(s, k, &p, dstar);
  return s;
}

KktReport check_kkt(const OptimalSetpoint& s, const SteadyStateConstants& k,
                    const DataCenterParams& p, double dstar, double tolerance) {
  require_dims(k, p);
  const auto n = k.c1.size();
  KktReport r;
  r.tolerance = tolerance;
  const Vector d = k.c3 * s.tout_bar + k.c4(dstar);

  if (s.mu.size() == n && s.mu_plus.size() == n && s.mu_minus.size() == n) {
    r.stationarity =
        (-k.c1 + s.mu + k.c3.transpose() * (s.mu_plus - s.mu_minus))
            .cwiseAbs()
            .maxCoeff();
    r.slack_upper = std::abs(s.mu_plus.dot(d - p.dmax));
    r.slack_lower = std::abs(s.mu_minus.dot(d));
    r.slack_temperature = std::abs(s.mu.dot(s.tout_bar - p.tsafe));
    const double min_mult = std::min(
        {s.mu.minCoeff(), s.mu_plus.minCoeff(), s.mu_minus.minCoeff()});
    r.multiplier_sign = std::max(0.0, -min_mult);
  } else {
    r.stationarity = std::numeric_limits<double>::infinity();
  }
  r.workload_bounds = std::max(
      {0.0, (-d).maxCoeff(), (d - p.dmax).maxCoeff()});
  r.temperature_bound = std::max(0.0, (s.tout_bar - p.tsafe).maxCoeff());
  r.total_workload = std::abs(s.d_bar.sum() - dstar);
  r.pass = r.max_residual() < tolerance;
  return r;
}

OptimalSetpoint brute_force_oracle(const SteadyStateConstants& k,
                                   const DataCenterParams& p, double dstar) {
  require_dims(k, p);
  const auto n = k.c1.size();
  if (n > 6) {
    throw Error(ErrorCode::kSizeLimit,
                fmt::format("vertex enumeration limited to n <= 6 (got {})", n));
  }
  require_dstar(p, dstar);

  const BoundSystem sys(k, p, dstar);
  const Eigen::Index m = sys.count();
  std::vector<Eigen::Index> pick(n);
  std::iota(pick.begin(), pick.end(), Eigen::Index{0});

  bool found = false;
  double best = -std::numeric_limits<double>::infinity();
  Vector best_x;
  while (true) {
    Matrix a(n, n);
    Vector b(n);
    for (Eigen::Index r = 0; r < n; ++r) {
      a.row(r) = sys.row(pick[r]).transpose();
      b(r) = sys.rhs(pick[r]);
    }
    Eigen::FullPivLU<Matrix> lu(a);
    if (lu.isInvertible()) {
      const Vector x = lu.solve(b);
      bool feasible = true;
      for (Eigen::Index id = 0; id < m && feasible; ++id) {
        feasible = sys.violation(id, x) <= sys.tolerance(id);
      }
      const double obj = k.c1.dot(x);
      if (feasible && obj > best) {
        best = obj;
        best_x = x;
        found = true;
      }
    }

    // Next n-combination of m indices in lexicographic order.
    Eigen::Index i = n - 1;
    while (i >= 0 && pick[i] == m - n + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (Eigen::Index j = i + 1; j < n; ++j) pick[j] = pick[j - 1] + 1;
  }
  if (!found) {
    throw Error(ErrorCode::kInfeasible, "no feasible vertex");
  }

  OptimalSetpoint s;
  s.tout_bar = best_x;
  s.d_bar = k.c3 * best_x + k.c4(dstar);
  finalize(s, k, &p, dstar);
  return s;
}

}  // namespace thermoptic
