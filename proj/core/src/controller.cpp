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

#include "thermoptic/controller.hpp"

#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "thermoptic/error.hpp"
#include "thermoptic/model.hpp"
#include "thermoptic/steady_state.hpp"

namespace thermoptic {

LyapunovSolution solve_lyapunov(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorCode::kDimensionMismatch, "Lyapunov solve needs a square matrix");
  }
  const HurwitzReport hurwitz = verify_hurwitz(a);
  const bool stable = hurwitz.eigen_converged
                          ? hurwitz.max_eigen_real < 0.0
                          : hurwitz.dominance_margin > 0.0 && hurwitz.max_diagonal < 0.0;
  if (!stable) {
    throw Error(ErrorCode::kNotHurwitz,
                fmt::format("matrix is not Hurwitz (max Re(lambda) = {})",
                            hurwitz.max_eigen_real));
  }

  // Bartels-Stewart on the complex Schur form A = U T U^*. For real A,
  // A^T = A^*, so the equation becomes T^* Y + Y T = -2 I with Y = U^* Z U,
  // which is solved one column at a time by forward substitution.
  const auto n = a.rows();
  using Complex = std::complex<double>;
  using CMatrix = Eigen::MatrixXcd;
  Eigen::ComplexSchur<Matrix> schur(a);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorCode::kNonConvergence, "Schur decomposition did not converge");
  }
  const CMatrix& t = schur.matrixT();
  const CMatrix& u = schur.matrixU();
  const CMatrix rhs = -2.0 * CMatrix::Identity(n, n);  // U^* (-2 I) U

  CMatrix y = CMatrix::Zero(n, n);
  double sep = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < n; ++j) {
    Eigen::VectorXcd col = rhs.col(j);
    for (Eigen::Index k = 0; k < j; ++k) col -= t(k, j) * y.col(k);
    // (T^* + t_jj I) is lower triangular.
    for (Eigen::Index i = 0; i < n; ++i) {
      Complex acc = col(i);
      for (Eigen::Index k = 0; k < i; ++k) acc -= std::conj(t(k, i)) * y(k, j);
      const Complex pivot = std::conj(t(i, i)) + t(j, j);
      sep = std::min(sep, std::abs(pivot));
      y(i, j) = acc / pivot;
    }
  }

  const Matrix eye = Matrix::Identity(n, n);
  LyapunovSolution out;
  out.z = (u * y * u.adjoint()).real();
  out.z = 0.5 * (out.z + out.z.transpose()).eval();
  out.residual = (a.transpose() * out.z + out.z * a + 2.0 * eye).cwiseAbs().maxCoeff();
  // Smallest |lambda_i^* + lambda_j| relative to the operator scale 2 ||A||.
  const double scale = 2.0 * a.cwiseAbs().rowwise().sum().maxCoeff();
  out.rcond = scale > 0.0 ? sep / scale : 0.0;
  out.ill_conditioned = out.rcond < 1e-12;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(out.z, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success || !(eig.eigenvalues().minCoeff() > 0.0)) {
    throw Error(ErrorCode::kNotHurwitz, "Lyapunov solution is not positive definite");
  }
  return out;
}

ControllerGains make_controller_gains(const DataCenterParams& p) {
  ControllerGains g;
  g.a = system_matrix_a(p);
  g.b = input_matrix_b(p);
  g.tsafe = p.tsafe;
  const LyapunovSolution lyap = solve_lyapunov(g.a);
  g.z = lyap.z;
  g.lyapunov_residual = lyap.residual;
  g.ill_conditioned = lyap.ill_conditioned;
  g.tsup_gain = (g.a.transpose() * g.z).colwise().sum().transpose();
  g.workload_gain = g.b.transpose() * g.z;
  return g;
}

double tsup_derivative(const ControllerGains& g, const Vector& tout) {
  if (tout.size() != g.tsafe.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "tout length does not match gains");
  }
  return g.tsup_gain.dot(tout - g.tsafe);
}

Vector workload_derivative(const ControllerGains& g, const Vector& tout) {
  if (tout.size() != g.tsafe.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "tout length does not match gains");
  }
  const Vector r = g.workload_gain * (tout - g.tsafe);
  return Vector::Constant(r.size(), r.mean()) - r;
}

LyapunovCertificate certificate(const ControllerGains& g, const SystemState& s,
                                const OptimalSetpoint& setpoint) {
  const Vector dt = s.tout - setpoint.tout_bar;
  const double dtsup = s.tsup - setpoint.tsup_bar;
  const Vector dd = s.d - setpoint.d_bar;
  LyapunovCertificate c;
  c.v = 0.5 * dt.dot(g.z * dt);
  c.xi1 = 0.5 * dtsup * dtsup;
  c.xi2 = 0.5 * dd.squaredNorm();
  c.total = c.v + c.xi1 + c.xi2;
  c.dissipation = -dt.squaredNorm();
  return c;
}

}  // namespace thermoptic
