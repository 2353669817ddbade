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

// Straightforward reference implementations used to cross-check the library.
// They favour explicit loops and dense solves over the library's closed forms.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "thermoptic/params.hpp"

namespace thermoptic::testing {

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Random parameters satisfying validate_params. Homogeneous instances share v
/// and w; everything else varies per rack.
inline DataCenterParams random_params(std::mt19937_64& rng, int n, bool homogeneous) {
  for (;;) {
    DataCenterParams p;
    const double level = uniform(rng, 0.05, 0.5);
    p.gamma.resize(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) p.gamma(i, j) = uniform(rng, 0.2, 1.0);
      p.gamma.row(i) *= uniform(rng, 0.5, 1.0) * level / p.gamma.row(i).sum();
    }
    p.flow.resize(n);
    p.mass.resize(n);
    p.v.resize(n);
    p.w.resize(n);
    p.dmax.resize(n);
    p.tsafe.resize(n);
    const double v0 = uniform(rng, 100.0, 2000.0);
    const double w0 = uniform(rng, 20.0, 200.0);
    for (int i = 0; i < n; ++i) {
      p.flow(i) = uniform(rng, 0.2, 1.0);
      p.mass(i) = uniform(rng, 5.0, 50.0);
      p.v(i) = homogeneous ? v0 : uniform(rng, 100.0, 2000.0);
      p.w(i) = homogeneous ? w0 : uniform(rng, 20.0, 200.0);
      p.dmax(i) = std::floor(uniform(rng, 5.0, 41.0));
      p.tsafe(i) = uniform(rng, 25.0, 35.0);
    }
    if (validate_params(p).empty()) return p;
  }
}

/// A_ij = rho (gamma_ji - delta_ij) f_j / m_i, entry by entry.
inline Matrix loop_system_matrix(const DataCenterParams& p) {
  const auto n = p.gamma.rows();
  Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = p.rho * (p.gamma(j, i) - (i == j ? 1.0 : 0.0)) * p.flow(j) / p.mass(i);
    }
  }
  return a;
}

/// Energy balance of each rack written out with explicit inlet temperatures:
/// cp m_i dT_i/dt = rho cp f_i (Tin_i - T_i) + P_i, where the inlet mixes the
/// recirculated exhaust of every rack with CRAC supply air.
inline Vector loop_derivative(const DataCenterParams& p, const Vector& tout, double tsup,
                              const Vector& d) {
  const auto n = tout.size();
  Vector out(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double recirculated = 0.0;
    double recirculated_flow = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      recirculated += p.rho * p.cp * p.gamma(j, i) * p.flow(j) * tout(j);
      recirculated_flow += p.gamma(j, i) * p.flow(j);
    }
    const double supply = p.rho * p.cp * (p.flow(i) - recirculated_flow) * tsup;
    const double exhaust = p.rho * p.cp * p.flow(i) * tout(i);
    const double power = p.v(i) + p.w(i) * d(i);
    out(i) = (recirculated + supply - exhaust + power) / (p.cp * p.mass(i));
  }
  return out;
}

/// Steady state from the full linear system: unknowns (Tsup, d) satisfy
/// 0 = A (T - Tsup 1) + M^-1 (V + W d) together with 1^T d = D*.
struct SteadyOracle {
  double tsup = 0.0;
  Vector d;
};

inline SteadyOracle dense_steady_state(const DataCenterParams& p, const Vector& tout,
                                       double dstar) {
  const auto n = tout.size();
  const Matrix a = loop_system_matrix(p);
  Matrix lhs = Matrix::Zero(n + 1, n + 1);
  Vector rhs = Vector::Zero(n + 1);
  for (Eigen::Index i = 0; i < n; ++i) {
    lhs(i, 0) = a.row(i).sum();  // moves -A 1 Tsup to the left
    lhs(i, 1 + i) = -p.w(i) / (p.cp * p.mass(i));
    rhs(i) = a.row(i).dot(tout) + p.v(i) / (p.cp * p.mass(i));
    lhs(n, 1 + i) = 1.0;
  }
  rhs(n) = dstar;
  const Vector x = lhs.fullPivLu().solve(rhs);
  return {x(0), x.tail(n)};
}

/// Lyapunov solution from the Kronecker form
/// (I (x) A^T + A^T (x) I) vec(Z) = -2 vec(I); dense, only for small n.
inline Matrix kronecker_lyapunov(const Matrix& a) {
  const auto n = a.rows();
  const Matrix at = a.transpose();
  Matrix kron = Matrix::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kron.block(i * n, i * n, n, n) += at;
    for (Eigen::Index j = 0; j < n; ++j) {
      kron.block(i * n, j * n, n, n) += at(i, j) * Matrix::Identity(n, n);
    }
  }
  const Matrix rhs = -2.0 * Matrix::Identity(n, n);
  const Vector z = kron.fullPivLu().solve(Eigen::Map<const Vector>(rhs.data(), n * n));
  return Eigen::Map<const Matrix>(z.data(), n, n);
}

/// exp(M t) for a real 2x2 matrix, from its eigenvalues s +/- q.
inline Eigen::Matrix2d expm2(const Eigen::Matrix2d& m, double t) {
  const double s = 0.5 * m.trace();
  const std::complex<double> q = std::sqrt(std::complex<double>(s * s - m.determinant()));
  std::complex<double> ch = std::cosh(q * t);
  std::complex<double> sh_over_q =
      std::abs(q) < 1e-300 ? std::complex<double>(t) : std::sinh(q * t) / q;
  const Eigen::Matrix2d shifted = m - s * Eigen::Matrix2d::Identity();
  return std::exp(s * t) * (ch.real() * Eigen::Matrix2d::Identity() + sh_over_q.real() * shifted);
}

}  // namespace thermoptic::testing
