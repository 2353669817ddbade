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

#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "thermoptic/controller.hpp"
#include "thermoptic/error.hpp"
#include "thermoptic/model.hpp"
#include "thermoptic/optimizer.hpp"
#include "thermoptic/steady_state.hpp"

namespace thermoptic {
namespace {

using testing::random_params;
using testing::uniform;

// Z = 2 int_0^inf exp(A^T t) exp(A t) dt. X(t) = 2 exp(A^T t) exp(A t) obeys
// X' = A^T X + X A; integrate it with RK4 and accumulate the quadrature.
Matrix integral_lyapunov(const Matrix& a, double h, double horizon) {
  const auto n = a.rows();
  auto f = [&](const Matrix& x) -> Matrix { return a.transpose() * x + x * a; };
  Matrix x = 2.0 * Matrix::Identity(n, n);
  Matrix z = Matrix::Zero(n, n);
  const int steps = static_cast<int>(horizon / h);
  for (int k = 0; k < steps; ++k) {
    const Matrix k1 = f(x);
    const Matrix k2 = f(x + 0.5 * h * k1);
    const Matrix k3 = f(x + 0.5 * h * k2);
    const Matrix k4 = f(x + h * k3);
    const Matrix next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    // Simpson on [t, t+h]; the midpoint comes from cubic Hermite interpolation.
    const Matrix half = 0.5 * (x + next) + (h / 8.0) * (k1 - f(next));
    z += (h / 6.0) * (x + 4.0 * half + next);
    x = next;
  }
  return z;
}

TEST(Lyapunov, ScalarCase) {
  const LyapunovSolution s = solve_lyapunov(Matrix::Constant(1, 1, -0.8));
  EXPECT_NEAR(s.z(0, 0), 1.25, 1e-14);
}

TEST(Lyapunov, SymmetricMatrixGivesNegativeInverse) {
  Matrix a(3, 3);
  a << -3.0, 0.5, 0.2, 0.5, -2.0, 0.1, 0.2, 0.1, -1.5;
  const LyapunovSolution s = solve_lyapunov(a);
  const Matrix expected = -a.inverse();
  EXPECT_LT((s.z - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Lyapunov, RandomHurwitzMatrices) {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto p = random_params(rng, 1 + trial % 8, trial % 2 == 0);
    const Matrix a = system_matrix_a(p);
    const LyapunovSolution s = solve_lyapunov(a);
    const Matrix residual = a.transpose() * s.z + s.z * a + 2.0 * Matrix::Identity(a.rows(), a.rows());
    EXPECT_LT(residual.cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_LT((s.z - s.z.transpose()).cwiseAbs().maxCoeff(), 1e-10);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s.z + s.z.transpose()));
    EXPECT_GT(eig.eigenvalues().minCoeff(), 0.0);
  }
}

TEST(Lyapunov, AgreesWithKroneckerForm) {
  std::mt19937_64 rng(49);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_params(rng, 1 + trial % 8, trial % 2 == 0);
    const Matrix a = system_matrix_a(p);
    const Matrix expected = testing::kronecker_lyapunov(a);
    const LyapunovSolution s = solve_lyapunov(a);
    EXPECT_LT((s.z - expected).cwiseAbs().maxCoeff(), 1e-9 * expected.cwiseAbs().maxCoeff());
    EXPECT_FALSE(s.ill_conditioned);
  }
}

TEST(Lyapunov, NonNormalMatrix) {
  Matrix a(3, 3);
  a << -1.0, 5.0, 3.0, 0.0, -2.0, 7.0, 0.0, 0.0, -0.3;
  ASSERT_TRUE(verify_hurwitz(a).max_eigen_real < 0.0);
  const LyapunovSolution s = solve_lyapunov(a);
  EXPECT_LT((s.z - testing::kronecker_lyapunov(a)).cwiseAbs().maxCoeff(), 1e-9 * s.z.cwiseAbs().maxCoeff());
}

TEST(Lyapunov, AgreesWithIntegralForm) {
  std::mt19937_64 rng(42);
  for (int n = 1; n <= 3; ++n) {
    const auto p = random_params(rng, n, false);
    const Matrix a = system_matrix_a(p);
    // Decay rate sets the horizon: exp(2 lambda t) must be negligible.
    const double slowest = -verify_hurwitz(a).max_eigen_real;
    const double fastest = a.cwiseAbs().rowwise().sum().maxCoeff();
    const double h = 0.05 / fastest;
    const Matrix z = integral_lyapunov(a, h, 20.0 / slowest);
    const LyapunovSolution s = solve_lyapunov(a);
    EXPECT_LT((z - s.z).cwiseAbs().maxCoeff(), 1e-4 * s.z.cwiseAbs().maxCoeff()) << n;
  }
}

TEST(Lyapunov, RejectsUnstableMatrix) {
  Matrix a(2, 2);
  a << 0.1, 0.0, 0.0, -1.0;
  try {
    solve_lyapunov(a);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotHurwitz);
  }
}

TEST(Controllers, RestAtTsafe) {
  std::mt19937_64 rng(43);
  const auto p = random_params(rng, 5, true);
  const ControllerGains g = make_controller_gains(p);
  EXPECT_EQ(tsup_derivative(g, p.tsafe), 0.0);
  EXPECT_TRUE(workload_derivative(g, p.tsafe).isZero(0.0));
}

TEST(Controllers, HotRacksLowerTheSupplyTemperature) {
  std::mt19937_64 rng(44);
  for (int trial = 0; trial < 30; ++trial) {
    const auto p = random_params(rng, 1 + trial % 6, trial % 2 == 0);
    const ControllerGains g = make_controller_gains(p);
    const auto n = static_cast<Eigen::Index>(p.size());
    const double quad = Vector::Ones(n).dot(g.a.transpose() * g.z * Vector::Ones(n));
    EXPECT_LT(quad, 0.0);
    EXPECT_LT(tsup_derivative(g, p.tsafe.array() + 0.5), 0.0);
  }
}

TEST(Controllers, ScalarClosedForm) {
  const auto p = make_homogeneous_params(Matrix::Constant(1, 1, 0.3), 0.4, 6.0, 100.0, 20.0,
                                         10.0, 30.0);
  const ControllerGains g = make_controller_gains(p);
  const double a = g.a(0, 0);
  const double z = g.z(0, 0);
  EXPECT_NEAR(tsup_derivative(g, Vector::Constant(1, 31.2)), a * z * 1.2, 1e-12);
  EXPECT_EQ(workload_derivative(g, Vector::Constant(1, 31.2))(0), 0.0);
}

TEST(Controllers, WorkloadRateSumsToZero) {
  std::mt19937_64 rng(45);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 1 + trial % 8;
    const auto p = random_params(rng, n, trial % 2 == 0);
    const ControllerGains g = make_controller_gains(p);
    const Vector tout = Vector::NullaryExpr(n, [&] { return uniform(rng, 20.0, 40.0); });
    const Vector rate = workload_derivative(g, tout);
    EXPECT_LT(std::abs(rate.sum()), 1e-12 * std::max(1.0, rate.cwiseAbs().maxCoeff()));
  }
}

TEST(Controllers, TwoRackAntisymmetry) {
  std::mt19937_64 rng(46);
  const auto p = random_params(rng, 2, true);
  const ControllerGains g = make_controller_gains(p);
  const Vector rate = workload_derivative(g, Vector(Eigen::Vector2d(33.0, 27.0)));
  EXPECT_NEAR(rate(0), -rate(1), 1e-14);
}

TEST(Certificate, ZeroAtSetpoint) {
  std::mt19937_64 rng(47);
  const auto p = random_params(rng, 4, true);
  const auto k = compute_constants(p);
  const ControllerGains g = make_controller_gains(p);
  const OptimalSetpoint sp = solve_reduced(p, k, 0.5 * p.capacity());
  const SystemState s{sp.tout_bar, sp.tsup_bar, sp.d_bar, 0.0};
  const LyapunovCertificate c = certificate(g, s, sp);
  EXPECT_EQ(c.v, 0.0);
  EXPECT_EQ(c.xi1, 0.0);
  EXPECT_EQ(c.xi2, 0.0);
  EXPECT_EQ(c.total, 0.0);
}

TEST(Certificate, ComponentsMatchDefinitions) {
  std::mt19937_64 rng(48);
  const auto p = random_params(rng, 3, true);
  const auto k = compute_constants(p);
  const ControllerGains g = make_controller_gains(p);
  const OptimalSetpoint sp = solve_reduced(p, k, 0.4 * p.capacity());
  SystemState s{sp.tout_bar.array() + 0.3, sp.tsup_bar - 0.2, sp.d_bar, 0.0};
  s.d(0) += 0.5;
  s.d(1) -= 0.5;
  const LyapunovCertificate c = certificate(g, s, sp);
  const Vector dt = s.tout - sp.tout_bar;
  EXPECT_NEAR(c.v, 0.5 * dt.dot(g.z * dt), 1e-12);
  EXPECT_NEAR(c.xi1, 0.5 * 0.04, 1e-12);
  EXPECT_NEAR(c.xi2, 0.25, 1e-12);
  EXPECT_NEAR(c.total, c.v + c.xi1 + c.xi2, 1e-15);
  EXPECT_NEAR(c.dissipation, -dt.squaredNorm(), 1e-12);
}

}  // namespace
}  // namespace thermoptic
