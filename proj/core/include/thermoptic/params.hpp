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

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace thermoptic {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Quadratic CRAC coefficient of performance, COP(T) = a*T^2 + b*T + c with T
/// in degrees Celsius, valid on [t_lo, t_hi].
///
/// Construction rejects curves that are not strictly positive and strictly
/// increasing on the validity interval; cooling cost can only be traded
/// against supply temperature when COP grows with it.
class CopCurve {
 public:
  /// Defaults reproduce COP(20) ~ 3.19 and COP(25) ~ 4.73 to within 0.01.
  static constexpr double kDefaultA = 0.0068;
  static constexpr double kDefaultB = 0.0008;
  static constexpr double kDefaultC = 0.458;
  static constexpr double kDefaultLo = 10.0;
  static constexpr double kDefaultHi = 35.0;

  CopCurve();
  CopCurve(double a, double b, double c, double t_lo, double t_hi);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double t_lo() const { return t_lo_; }
  double t_hi() const { return t_hi_; }

  bool in_range(double t) const { return t >= t_lo_ && t <= t_hi_; }

  /// Evaluates the polynomial; throws kOutOfRange outside [t_lo, t_hi].
  double operator()(double t) const;

  /// Evaluates without the range check.
  double evaluate(double t) const { return (a_ * t + b_) * t + c_; }

 private:
  double a_;
  double b_;
  double c_;
  double t_lo_;
  double t_hi_;
};

/// Physical and power constants of a data center with n racks.
///
/// Units are SI with temperatures in degrees Celsius. gamma(i, j) is the
/// fraction of rack i's exhaust airflow that re-enters rack j.
struct DataCenterParams {
  Matrix gamma;
  Vector flow;   // m^3/s
  Vector mass;   // kg of air per rack
  double rho = 1.19;   // kg/m^3
  double cp = 1005.0;  // J/(degC kg)
  Vector v;      // idle power, W
  Vector w;      // power per active CPU, W/CPU
  Vector dmax;   // CPU capacity
  Vector tsafe;  // degC
  CopCurve cop;

  std::size_t size() const { return static_cast<std::size_t>(v.size()); }
  double capacity() const { return dmax.sum(); }
};

/// Builds parameters for n identical racks sharing one recirculation matrix.
DataCenterParams make_homogeneous_params(const Matrix& gamma, double flow,
                                         double mass, double v, double w,
                                         double dmax, double tsafe,
                                         const CopCurve& cop = CopCurve{});

struct SystemState {
  Vector tout;
  double tsup = 0.0;
  Vector d;
  double time = 0.0;
};

/// A group of jobs that arrives together and needs `cpus` processors.
struct JobBatch {
  long cpus = 1;
  double arrival = 0.0;  // s
};

struct Violation {
  std::string field;
  int row = -1;
  int col = -1;
  double value = 0.0;
  std::string message;
};

/// Lists every violated parameter invariant; an empty result means the
/// parameters are valid. Strict inequalities are checked with zero tolerance.
std::vector<Violation> validate_params(const DataCenterParams& p);

/// True when all racks share the same idle and per-CPU power.
bool is_homogeneous(const DataCenterParams& p);

/// Throws kInvalidArgument describing the first violation, if any.
void require_valid(const DataCenterParams& p);

}  // namespace thermoptic
