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

#include "thermoptic/cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "thermoptic/cli/config.hpp"
#include "thermoptic/cli/log.hpp"
#include "thermoptic/controller.hpp"
#include "thermoptic/model.hpp"
#include "thermoptic/optimizer.hpp"
#include "thermoptic/simulator.hpp"
#include "thermoptic/steady_state.hpp"

namespace thermoptic::cli {

namespace {

using nlohmann::json;

constexpr double kLyapunovTolerance = 1e-9;

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

// JSON has no NaN; non-finite values are written as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

std::string describe(const Violation& v) {
  std::string where = v.field;
  if (v.row >= 0) where += fmt::format("[{}]", v.row);
  if (v.col >= 0) where += fmt::format("[{}]", v.col);
  return fmt::format("{}: {}", where, v.message);
}

ConfigDocument load(const CommandOptions& opts) {
  if (opts.config_path.empty()) throw ConfigError("--config is required");
  ConfigDocument doc = load_config(opts.config_path);
  if (opts.seed) apply_seed(doc, *opts.seed);
  return doc;
}

// Records every parameter violation; true when there are none.
bool collect_violations(const DataCenterParams& p, RunReport& report) {
  for (const Violation& v : validate_params(p)) report.violations.push_back(describe(v));
  if (!report.violations.empty()) report.exit_code = kExitViolation;
  return report.violations.empty();
}

void add_check(RunReport& report, std::string name, bool pass, std::string detail) {
  report.checks.push_back({std::move(name), pass, std::move(detail)});
  if (!pass) report.exit_code = kExitViolation;
}

// Runs `body`, turning a thrown library error into a failed check.
void guarded_check(RunReport& report, const std::string& name,
                   const std::function<void()>& body) {
  try {
    body();
  } catch (const Error& e) {
    add_check(report, name, false, e.what());
  }
}

void hurwitz_check(const DataCenterParams& p, RunReport& report) {
  guarded_check(report, "A Hurwitz", [&] {
    const HurwitzReport h = verify_a_hurwitz(p);
    add_check(report, "A Hurwitz", h.pass,
              fmt::format("dominance margin {:.3e}, max diagonal {:.3e}, max Re(lambda) "
                          "{:.3e}{}",
                          h.dominance_margin, h.max_diagonal, h.max_eigen_real,
                          h.eigen_converged ? "" : " (eigen solver did not converge)"));
  });
}

void identity_checks(const DataCenterParams& p, RunReport& report) {
  guarded_check(report, "steady-state identities", [&] {
    const SteadyStateConstants k = compute_constants(p);
    const double cap = p.capacity();
    for (const double dstar : {0.0, 0.5 * cap, cap}) {
      const IdentityReport r = check_identities(k, dstar);
      add_check(report, fmt::format("identities D*={:g}", dstar), r.pass,
                fmt::format("c1 sum {:.2e}, c3 cols {:.2e}, c3 rows {:.2e}, c4 sum {:.2e}",
                            r.c1_sum, r.c3_columns, r.c3_rows, r.c4_sum));
    }
  });
}

void write_file(const std::string& path, const std::function<void(std::ostream&)>& body,
                RunReport& report) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(fmt::format("cannot write '{}'", path));
  body(out);
  out.flush();
  if (!out) throw ConfigError(fmt::format("failed while writing '{}'", path));
  report.outputs.push_back(path);
}

std::string require_out(const CommandOptions& opts, const char* command) {
  if (opts.out_path.empty()) {
    throw ConfigError(fmt::format("{} needs --out <path>", command));
  }
  return opts.out_path;
}

std::string sidecar_path(const std::string& out) {
  std::filesystem::path path(out);
  path.replace_extension(".metrics.json");
  return path.string();
}

std::string state_dump(const SystemState& s) {
  std::string text = fmt::format("t={:.9g} tsup={:.9g} tout=[", s.time, s.tsup);
  for (Eigen::Index i = 0; i < s.tout.size(); ++i) {
    text += fmt::format("{}{:.9g}", i ? "," : "", s.tout(i));
  }
  text += "] d=[";
  for (Eigen::Index i = 0; i < s.d.size(); ++i) {
    text += fmt::format("{}{:.9g}", i ? "," : "", s.d(i));
  }
  return text + "]";
}

IntervalSummary summarize(const SimulationRecord& rec) {
  IntervalSummary sum;
  sum.intervals = rec.intervals.size();
  double conv_total = 0.0;
  double cost_total = 0.0;
  std::size_t cost_count = 0;
  for (const IntervalMetrics& m : rec.intervals) {
    if (m.convergence_time) {
      ++sum.converged;
      conv_total += *m.convergence_time;
      sum.max_convergence_s = std::max(sum.max_convergence_s, *m.convergence_time);
    }
    sum.max_band = std::max(sum.max_band, m.max_deviation);
    if (std::isfinite(m.mean_cost)) {
      cost_total += m.mean_cost;
      ++cost_count;
    }
  }
  if (sum.converged > 0) sum.mean_convergence_s = conv_total / static_cast<double>(sum.converged);
  sum.mean_cost_w = cost_count > 0 ? cost_total / static_cast<double>(cost_count)
                                   : std::numeric_limits<double>::quiet_NaN();
  return sum;
}

json metrics_json(const ConfigDocument& doc, const SimulationRecord& rec,
                  const IntervalSummary& sum) {
  json intervals = json::array();
  for (const IntervalMetrics& m : rec.intervals) {
    intervals.push_back({
        {"index", m.index},
        {"start_s", m.start},
        {"end_s", m.end},
        {"dstar", m.dstar},
        {"convergence_s", m.convergence_time ? json(*m.convergence_time) : json(nullptr)},
        {"max_deviation_c", m.max_deviation},
        {"settled_band_c", m.settled_band},
        {"certificate_initial", m.initial_certificate},
        {"certificate_final", m.final_certificate},
        {"certificate_rise", finite_or_null(m.certificate_rise)},
        {"conservation_error", m.conservation_error},
        {"interior_violation", m.interior_violation},
        {"mean_cost_w", finite_or_null(m.mean_cost)},
    });
  }
  return {
      {"config", doc.path},
      {"injection_policy", std::string(to_string(rec.injection))},
      {"seed", doc.trace.seed},
      {"dt_s", rec.dt},
      {"stride", rec.sample_stride},
      {"steps", rec.steps},
      {"summary",
       {{"intervals", sum.intervals},
        {"converged", sum.converged},
        {"max_convergence_s", sum.max_convergence_s},
        {"mean_convergence_s", sum.mean_convergence_s},
        {"max_band_c", sum.max_band},
        {"mean_cost_w", finite_or_null(sum.mean_cost_w)}}},
      {"warnings", rec.warnings},
      {"intervals", intervals},
  };
}

// Shared error handling: every command returns a report, never throws.
RunReport run_command(const char* name, const std::function<void(RunReport&)>& body) {
  RunReport report;
  try {
    body(report);
  } catch (const ConfigError& e) {
    report.exit_code = kExitInput;
    report.messages.push_back(e.what());
  } catch (const DivergenceError& e) {
    report.exit_code = kExitDivergence;
    report.messages.push_back(e.what());
    report.messages.push_back("last finite state: " + state_dump(e.last_finite_state()));
  } catch (const Error& e) {
    report.exit_code = kExitViolation;
    report.messages.push_back(fmt::format("{}: {}", to_string(e.code()), e.what()));
  } catch (const std::exception& e) {
    report.exit_code = kExitInput;
    report.messages.push_back(e.what());
  }
  if (report.messages.empty()) {
    report.messages.push_back(
        fmt::format("{}: {}", name, report.exit_code == kExitOk ? "ok" : "failed"));
  }
  return report;
}

}  // namespace

RunReport cmd_validate(const CommandOptions& opts) {
  return run_command("validate", [&](RunReport& report) {
    const ConfigDocument doc = load(opts);
    const DataCenterParams& p = doc.params;
    const bool valid = collect_violations(p, report);
    add_check(report, "parameters", valid,
              valid ? fmt::format("{} racks", p.size())
                    : fmt::format("{} violation(s)", report.violations.size()));
    if (!valid) return;
    hurwitz_check(p, report);
    identity_checks(p, report);
  });
}

RunReport cmd_solve(const CommandOptions& opts) {
  return run_command("solve", [&](RunReport& report) {
    const ConfigDocument doc = load(opts);
    if (!opts.dstar) throw ConfigError("solve needs --dstar <cpus>");
    const DataCenterParams& p = doc.params;
    if (!collect_violations(p, report)) return;

    const double dstar = *opts.dstar;
    const SteadyStateConstants k = compute_constants(p);
    const OptimalSetpoint s = solve_reduced(p, k, dstar);
    const KktReport kkt = check_kkt(s, k, p, dstar);
    if (!kkt.pass) {
      report.exit_code = kExitViolation;
      report.messages.push_back(
          fmt::format("KKT residual {:.3e} above tolerance {:.1e}", kkt.max_residual(),
                      kkt.tolerance));
    }
    const json doc_out = {
        {"dstar", dstar},
        {"tout_bar", to_json(s.tout_bar)},
        {"tsup_bar", s.tsup_bar},
        {"d_bar", to_json(s.d_bar)},
        {"mu", to_json(s.mu)},
        {"mu_plus", to_json(s.mu_plus)},
        {"mu_minus", to_json(s.mu_minus)},
        {"active_set", s.active_set},
        {"lower_active_set", s.lower_active_set},
        {"objective", s.objective},
        {"cost_w", finite_or_null(s.cost)},
        {"degenerate", s.degenerate},
        {"iterations", s.iterations},
        {"kkt",
         {{"stationarity", kkt.stationarity},
          {"workload_bounds", kkt.workload_bounds},
          {"temperature_bound", kkt.temperature_bound},
          {"total_workload", kkt.total_workload},
          {"slack_upper", kkt.slack_upper},
          {"slack_lower", kkt.slack_lower},
          {"slack_temperature", kkt.slack_temperature},
          {"multiplier_sign", kkt.multiplier_sign},
          {"tolerance", kkt.tolerance},
          {"pass", kkt.pass}}},
    };
    const std::string text = doc_out.dump(2) + "\n";
    if (opts.out_path.empty()) {
      std::cout << text;
    } else {
      write_file(opts.out_path, [&](std::ostream& os) { os << text; }, report);
    }
    report.messages.push_back(fmt::format(
        "D*={:g}: Tsup={:.4f} degC, {} rack(s) at capacity, facility power {:.1f} W", dstar,
        s.tsup_bar, s.active_set.size(), s.cost));
  });
}

RunReport cmd_simulate(const CommandOptions& opts) {
  return run_command("simulate", [&](RunReport& report) {
    const ConfigDocument doc = load(opts);
    const std::string out = require_out(opts, "simulate");
    const DataCenterParams& p = doc.params;
    if (!collect_violations(p, report)) return;

    const WorkloadTrace trace = generate_trace(p, doc.trace);
    log(LogLevel::kInfo, "simulating {} intervals at dt={} s ({})", trace.intervals.size(),
        doc.sim.dt, to_string(doc.sim.injection));
    const SimulationRecord rec = run(p, trace, doc.sim);
    write_file(out, [&](std::ostream& os) { write_csv(os, rec); }, report);

    const IntervalSummary sum = summarize(rec);
    const std::string side = sidecar_path(out);
    write_file(side, [&](std::ostream& os) { os << metrics_json(doc, rec, sum).dump(2) << "\n"; },
               report);
    for (const std::string& w : rec.warnings) {
      log(LogLevel::kWarn, "{}", w);
      report.messages.push_back("warning: " + w);
    }
    report.summary = sum;
    report.messages.push_back(fmt::format(
        "{} intervals, {} settled (max {:.1f} s, mean {:.1f} s), max band {:.4f} degC, "
        "mean facility power {:.1f} W, injection {}",
        sum.intervals, sum.converged, sum.max_convergence_s, sum.mean_convergence_s,
        sum.max_band, sum.mean_cost_w, to_string(rec.injection)));
  });
}

RunReport cmd_verify(const CommandOptions& opts) {
  return run_command("verify", [&](RunReport& report) {
    const ConfigDocument doc = load(opts);
    const DataCenterParams& p = doc.params;
    const bool valid = collect_violations(p, report);
    add_check(report, "parameters", valid,
              valid ? fmt::format("{} racks", p.size())
                    : fmt::format("{} violation(s)", report.violations.size()));
    const auto n = static_cast<Eigen::Index>(p.size());
    if (p.gamma.rows() != n || p.gamma.cols() != n || p.flow.size() != n ||
        p.mass.size() != n) {
      return;  // nothing structural can be evaluated
    }

    guarded_check(report, "C3 structure", [&] {
      const C3StructureReport c3 = verify_c3_structure(compute_constants(p));
      add_check(report, "C3 structure", c3.pass,
                fmt::format("{}; min diagonal {:.3e}, max off-diagonal {:.3e}",
                            to_string(c3.status), c3.min_diagonal, c3.max_off_diagonal));
    });
    hurwitz_check(p, report);
    identity_checks(p, report);
    guarded_check(report, "Lyapunov residual", [&] {
      const LyapunovSolution z = solve_lyapunov(system_matrix_a(p));
      const double scale = std::max(1.0, z.z.cwiseAbs().rowwise().sum().maxCoeff());
      add_check(report, "Lyapunov residual", z.residual <= kLyapunovTolerance * scale,
                fmt::format("residual {:.2e}, rcond {:.2e}{}", z.residual, z.rcond,
                            z.ill_conditioned ? " (ill-conditioned)" : ""));
    });
  });
}

RunReport cmd_trace(const CommandOptions& opts) {
  return run_command("trace", [&](RunReport& report) {
    const ConfigDocument doc = load(opts);
    const std::string out = require_out(opts, "trace");
    const WorkloadTrace trace = generate_trace(doc.params, doc.trace);
    write_file(out, [&](std::ostream& os) { write_trace_csv(os, trace); }, report);
    report.messages.push_back(fmt::format("{} intervals of {} s, seed {}",
                                          trace.intervals.size(), doc.trace.interval_s,
                                          trace.seed));
  });
}

void print_report(std::ostream& os, const RunReport& report) {
  for (const std::string& m : report.messages) os << m << "\n";
  for (const std::string& v : report.violations) os << "violation: " << v << "\n";
  if (!report.checks.empty()) {
    std::size_t width = 5;
    for (const CheckResult& c : report.checks) width = std::max(width, c.name.size());
    os << fmt::format("{:<{}}  {:<4}  {}\n", "check", width, "", "detail");
    for (const CheckResult& c : report.checks) {
      os << fmt::format("{:<{}}  {:<4}  {}\n", c.name, width, c.pass ? "PASS" : "FAIL",
                        c.detail);
    }
  }
  for (const std::string& path : report.outputs) os << "wrote " << path << "\n";
}

}  // namespace thermoptic::cli
