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

#include "thermoptic/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "thermoptic/model.hpp"
#include "thermoptic/steady_state.hpp"

namespace thermoptic {

std::string_view to_string(InjectionPolicy policy) {
  switch (policy) {
    case InjectionPolicy::kProportional: return "proportional";
    case InjectionPolicy::kEqualSplit: return "equal-split";
  }
  return "unknown";
}

std::optional<InjectionPolicy> parse_injection_policy(std::string_view name) {
  if (name == "proportional") return InjectionPolicy::kProportional;
  if (name == "equal-split" || name == "equal_split") return InjectionPolicy::kEqualSplit;
  return std::nullopt;
}

Vector inject_workload_change(const Vector& d_current, double dstar_new,
                              InjectionPolicy policy) {
  if (!(dstar_new >= 0.0) || !std::isfinite(dstar_new)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("new total workload {} must be finite and >= 0", dstar_new));
  }
  const auto n = d_current.size();
  const double total = d_current.sum();
  if (policy == InjectionPolicy::kProportional && total > 0.0) {
    return d_current * (dstar_new / total);
  }
  return d_current.array() + (dstar_new - total) / static_cast<double>(n);
}

namespace {

struct Derivative {
  Vector tout;
  double tsup = 0.0;
  Vector d;
};

Derivative closed_loop(const DataCenterParams& p, const ControllerGains& g,
                       const Vector& tout, double tsup, const Vector& d) {
  Derivative f;
  f.tout = g.a * (tout.array() - tsup).matrix() +
           (p.v + p.w.cwiseProduct(d)).cwiseQuotient(p.cp * p.mass);
  f.tsup = tsup_derivative(g, tout);
  f.d = workload_derivative(g, tout);
  return f;
}

bool all_finite(const SystemState& s) {
  return std::isfinite(s.tsup) && s.tout.allFinite() && s.d.allFinite();
}

}  // namespace

SystemState step(const DataCenterParams& p, const ControllerGains& g,
                 const SystemState& s, double dt) {
  const Derivative k1 = closed_loop(p, g, s.tout, s.tsup, s.d);
  const Derivative k2 = closed_loop(p, g, s.tout + 0.5 * dt * k1.tout,
                                    s.tsup + 0.5 * dt * k1.tsup,
                                    s.d + 0.5 * dt * k1.d);
  const Derivative k3 = closed_loop(p, g, s.tout + 0.5 * dt * k2.tout,
                                    s.tsup + 0.5 * dt * k2.tsup,
                                    s.d + 0.5 * dt * k2.d);
  const Derivative k4 = closed_loop(p, g, s.tout + dt * k3.tout,
                                    s.tsup + dt * k3.tsup, s.d + dt * k3.d);
  SystemState next;
  next.tout = s.tout + (dt / 6.0) * (k1.tout + 2.0 * k2.tout + 2.0 * k3.tout + k4.tout);
  next.tsup = s.tsup + (dt / 6.0) * (k1.tsup + 2.0 * k2.tsup + 2.0 * k3.tsup + k4.tsup);
  next.d = s.d + (dt / 6.0) * (k1.d + 2.0 * k2.d + 2.0 * k3.d + k4.d);
  next.time = s.time + dt;
  if (!all_finite(next)) {
    throw DivergenceError(
        fmt::format("closed-loop state became non-finite at t={} s", next.time), s);
  }
  return next;
}

namespace {

long long steps_for(double t, double dt, const char* what) {
  const double exact = t / dt;
  const long long steps = std::llround(exact);
  if (std::abs(exact - static_cast<double>(steps)) > 1e-9 * std::max(1.0, exact)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("{} {} s is not a multiple of dt={} s", what, t, dt));
  }
  return steps;
}

// Incremental bookkeeping for one workload interval.
class IntervalTracker {
 public:
  IntervalTracker(std::size_t index, double start, double dstar,
                  const SimulationConfig& config)
      : config_(&config) {
    m_.index = index;
    m_.start = start;
    m_.end = start;
    m_.dstar = dstar;
  }

  void observe(double time, const SystemState& s, const OptimalSetpoint& sp,
               const Vector& dmax, const LyapunovCertificate& cert, double cost) {
    const double deviation = (s.tout - sp.tout_bar).cwiseAbs().maxCoeff();
    m_.max_deviation = std::max(m_.max_deviation, deviation);

    // Settling: the final run of consecutive sub-threshold steps.
    if (deviation < config_->convergence_threshold) {
      if (run_length_ == 0) {
        run_start_ = time;
        run_band_ = 0.0;
      }
      ++run_length_;
      run_band_ = std::max(run_band_, deviation);
    } else {
      run_length_ = 0;
    }

    if (first_) {
      m_.initial_certificate = cert.total;
      first_ = false;
    } else {
      max_rise_ = std::max(max_rise_, cert.total - m_.final_certificate);
    }
    m_.final_certificate = cert.total;

    const double denom = m_.dstar > 0.0 ? m_.dstar : 1.0;
    m_.conservation_error =
        std::max(m_.conservation_error, std::abs(s.d.sum() - m_.dstar) / denom);

    if ((s.d.array() <= 0.0).any() || (s.d.array() >= dmax.array()).any()) {
      m_.interior_violation = true;
    }
    if (std::isfinite(cost)) {
      cost_sum_ += cost;
      ++cost_count_;
    }
    m_.end = time;
  }

  IntervalMetrics finish(double end) {
    m_.end = end;
    if (run_length_ >= config_->convergence_steps) {
      m_.convergence_time = run_start_ - m_.start;
      m_.settled_band = run_band_;
    }
    if (m_.initial_certificate > 0.0) {
      m_.certificate_rise = std::max(0.0, max_rise_) / m_.initial_certificate;
    } else {
      m_.certificate_rise = max_rise_ > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    }
    m_.mean_cost = cost_count_ > 0 ? cost_sum_ / static_cast<double>(cost_count_)
                                   : std::numeric_limits<double>::quiet_NaN();
    return m_;
  }

 private:
  const SimulationConfig* config_;
  IntervalMetrics m_;
  bool first_ = true;
  double max_rise_ = 0.0;
  int run_length_ = 0;
  double run_start_ = 0.0;
  double run_band_ = 0.0;
  double cost_sum_ = 0.0;
  long cost_count_ = 0;
};

}  // namespace

SimulationRecord run(const DataCenterParams& p, const WorkloadTrace& trace,
                     const SimulationConfig& config) {
  require_valid(p);
  require_valid_trace(trace, p.capacity());
  if (!(config.dt > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "dt must be positive");
  }
  if (config.sample_stride < 1) {
    throw Error(ErrorCode::kInvalidArgument, "sample stride must be >= 1");
  }
  if (config.convergence_steps < 1 || !(config.convergence_threshold > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid convergence criterion");
  }
  const double horizon = config.horizon > 0.0 ? config.horizon : trace.horizon;
  const long long total_steps = steps_for(horizon, config.dt, "horizon");
  const double first_end = trace.intervals.size() > 1 ? trace.intervals[1].start
                                                      : trace.horizon;
  if (horizon < first_end - 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "simulation horizon shorter than the first workload interval");
  }

  // Intervals that start inside the horizon, with their first step index.
  std::vector<long long> boundary;
  for (const TraceInterval& iv : trace.intervals) {
    if (iv.start >= horizon) break;
    boundary.push_back(steps_for(iv.start, config.dt, "interval start"));
  }

  const SteadyStateConstants k = compute_constants(p);
  const ControllerGains g = make_controller_gains(p);

  SimulationRecord rec;
  rec.injection = config.injection;
  rec.dt = config.dt;
  rec.sample_stride = config.sample_stride;
  rec.steps = static_cast<std::size_t>(total_steps);
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    rec.setpoints.push_back(solve_reduced(p, k, trace.intervals[j].dstar));
  }
  if (g.ill_conditioned) {
    rec.warnings.push_back("Lyapunov system is ill-conditioned");
  }

  const double dstar0 = trace.intervals.front().dstar;
  SystemState s;
  if (config.initial == InitialState::kExplicit) {
    if (!config.initial_state) {
      throw Error(ErrorCode::kInvalidArgument, "explicit initial state missing");
    }
    s = *config.initial_state;
    if (s.tout.size() != p.v.size() || s.d.size() != p.v.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "initial state has wrong rack count");
    }
    if (std::abs(s.d.sum() - dstar0) > 1e-9 * std::max(1.0, dstar0)) {
      rec.warnings.push_back(fmt::format(
          "initial workload sums to {} but D*(0) = {}", s.d.sum(), dstar0));
    }
  } else {
    s = steady_state(k, p.tsafe, dstar0);
  }
  s.time = 0.0;

  // Return-flow coefficients rho cp (1 - sum_j gamma_ij) f_i for the CRAC load.
  const Vector return_coeff =
      p.rho * p.cp * (1.0 - p.gamma.rowwise().sum().array()).matrix().cwiseProduct(p.flow);
  auto instantaneous_cost = [&](const SystemState& st) {
    if (!p.cop.in_range(st.tsup)) return std::numeric_limits<double>::quiet_NaN();
    const double q_rem = return_coeff.dot((st.tout.array() - st.tsup).matrix());
    return q_rem / p.cop.evaluate(st.tsup) + (p.v + p.w.cwiseProduct(st.d)).sum();
  };

  std::size_t interval = 0;
  IntervalTracker tracker(0, trace.intervals[0].start, dstar0, config);
  for (long long step_index = 0; step_index <= total_steps; ++step_index) {
    const double time = static_cast<double>(step_index) * config.dt;
    if (interval + 1 < boundary.size() && step_index == boundary[interval + 1]) {
      rec.intervals.push_back(tracker.finish(time));
      ++interval;
      const double dstar = trace.intervals[interval].dstar;
      s.d = inject_workload_change(s.d, dstar, config.injection);
      tracker = IntervalTracker(interval, trace.intervals[interval].start, dstar, config);
    }
    s.time = time;

    const OptimalSetpoint& sp = rec.setpoints[interval];
    const LyapunovCertificate cert = certificate(g, s, sp);
    const double cost = instantaneous_cost(s);
    tracker.observe(time, s, sp, p.dmax, cert, cost);
    rec.max_deviation =
        std::max(rec.max_deviation, (s.tout - sp.tout_bar).cwiseAbs().maxCoeff());
    if (step_index % config.sample_stride == 0) {
      rec.samples.push_back({s, trace.intervals[interval].dstar, cost, cert});
    }
    if (step_index < total_steps) s = step(p, g, s, config.dt);
  }
  rec.intervals.push_back(tracker.finish(horizon));

  for (const IntervalMetrics& m : rec.intervals) {
    if (m.interior_violation) {
      rec.warnings.push_back(fmt::format(
          "interval {} (t={} s): a rack workload left (0, dmax)", m.index, m.start));
    }
    if (!m.convergence_time) {
      rec.warnings.push_back(fmt::format(
          "interval {} (t={} s): did not settle within {} degC", m.index, m.start,
          config.convergence_threshold));
    }
  }
  return rec;
}

void write_csv(std::ostream& os, const SimulationRecord& record) {
  const Eigen::Index n = record.samples.empty() ? 0 : record.samples.front().state.tout.size();
  std::string line = "time_s";
  for (Eigen::Index i = 1; i <= n; ++i) line += fmt::format(",tout_{}", i);
  line += ",tsup";
  for (Eigen::Index i = 1; i <= n; ++i) line += fmt::format(",d_{}", i);
  line += ",dstar,cost_w,cert_v,cert_xi1,cert_xi2,cert_total\n";
  os << line;

  fmt::memory_buffer buf;
  for (const Sample& smp : record.samples) {
    buf.clear();
    auto out = std::back_inserter(buf);
    fmt::format_to(out, "{:.9g}", smp.state.time);
    for (Eigen::Index i = 0; i < n; ++i) fmt::format_to(out, ",{:.9g}", smp.state.tout(i));
    fmt::format_to(out, ",{:.9g}", smp.state.tsup);
    for (Eigen::Index i = 0; i < n; ++i) fmt::format_to(out, ",{:.9g}", smp.state.d(i));
    fmt::format_to(out, ",{:.9g},{:.9g},{:.9g},{:.9g},{:.9g},{:.9g}\n", smp.dstar,
                   smp.cost, smp.cert.v, smp.cert.xi1, smp.cert.xi2, smp.cert.total);
    os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
}

void write_trace_csv(std::ostream& os, const WorkloadTrace& trace) {
  os << "time_s,dstar\n";
  for (const TraceInterval& iv : trace.intervals) {
    os << fmt::format("{:.9g},{:.9g}\n", iv.start, iv.dstar);
  }
}

}  // namespace thermoptic
