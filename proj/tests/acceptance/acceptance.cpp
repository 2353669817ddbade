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

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Tolerances are fixed here and must not be loosened.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <fmt/format.h>

#include "oracles.hpp"
#include "scalar_case.hpp"
#include "thermoptic/cli/commands.hpp"
#include "thermoptic/cli/config.hpp"
#include "thermoptic/model.hpp"
#include "thermoptic/optimizer.hpp"
#include "thermoptic/simulator.hpp"
#include "thermoptic/steady_state.hpp"
#include "thermoptic/trace.hpp"

namespace {

using namespace thermoptic;
using Clock = std::chrono::steady_clock;

const std::string kFixture = std::string(THERMOPTIC_SOURCE_DIR) + "/data/datacenter30.json";
const std::string kGolden = std::string(THERMOPTIC_SOURCE_DIR) + "/tests/golden/datacenter30.csv";

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, fmt::format("exception: {}", e.what())};
  }
  const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
  const bool in_time = elapsed < budget_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %d %s: %s; %.3f s (budget %.0f s)%s\n", pass ? "PASS" : "FAIL", id, name,
              o.detail.c_str(), elapsed, budget_s, in_time ? "" : " OVER BUDGET");
  std::fflush(stdout);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome cop_reproduction() {
  // Curve through COP(20) = 3.19 and COP(25) = 4.73 exactly.
  const CopCurve cop(0.0068, 0.002, 0.43, 10.0, 35.0);
  const double p20 = crac_power(cop, 100.0, 20.0);
  const double p25 = crac_power(cop, 100.0, 25.0);
  const double saving = 100.0 * (p20 - p25) / p20;
  const bool pass = std::abs(p20 - 31.34) <= 0.01 && std::abs(p25 - 21.14) <= 0.01 &&
                    std::abs(saving - 32.5) <= 0.5;
  return {pass, fmt::format("P(20)={:.4f} W [31.34+-0.01], P(25)={:.4f} W [21.14+-0.01], "
                            "saving {:.2f}% [32.5+-0.5]",
                            p20, p25, saving)};
}

Outcome identity_suite() {
  std::mt19937_64 rng(2024);
  double worst = 0.0;
  int failed = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 8;
    const auto p = testing::random_params(rng, n, trial % 2 == 0);
    const auto k = compute_constants(p);
    const IdentityReport r = check_identities(k, testing::uniform(rng, 0.0, p.capacity()), 1e-9);
    worst = std::max({worst, r.c1_sum, r.c3_columns, r.c3_rows, r.c4_sum});
    if (!r.pass) ++failed;
  }
  return {failed == 0 && worst <= 1e-9,
          fmt::format("200 sets, n=1..8, worst normalized residual {:.2e} [<=1e-9], {} failed",
                      worst, failed)};
}

Outcome structural_proofs() {
  std::mt19937_64 rng(2025);
  int failed = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double max_eig = -std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + trial % 7;
    const auto p = testing::random_params(rng, n, true);
    const C3StructureReport c3 = verify_c3_structure(compute_constants(p));
    const HurwitzReport h = verify_a_hurwitz(p);
    const bool ok = c3.pass && c3.status == C3Status::kProved && c3.min_diagonal > 0.0 &&
                    c3.max_off_diagonal < 0.0 && h.dominance_margin > 0.0 &&
                    h.max_diagonal < 0.0 && h.eigen_converged && h.max_eigen_real < 0.0;
    if (!ok) ++failed;
    min_margin = std::min(min_margin, h.dominance_margin);
    max_eig = std::max(max_eig, h.max_eigen_real);
  }
  return {failed == 0, fmt::format("100 homogeneous sets, n=2..8, min dominance margin {:.3e}, "
                                   "max Re(lambda) {:.3e}, {} failed",
                                   min_margin, max_eig, failed)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(2026);
  int inactive = 0;
  int partial = 0;
  double worst_gap = 0.0;
  double worst_kkt = 0.0;
  int attempts = 0;
  while ((inactive < 25 || partial < 25) && attempts < 10000) {
    ++attempts;
    const int n = 2 + attempts % 4;
    const auto p = testing::random_params(rng, n, true);
    const auto k = compute_constants(p);
    const double dstar = testing::uniform(rng, 0.05, 0.98) * p.capacity();
    const Vector d0 = k.c3 * p.tsafe + k.c4(dstar);
    const bool is_inactive = (d0.array() > 0.0).all() && (d0.array() < p.dmax.array()).all();
    if (is_inactive ? inactive >= 25 : partial >= 25) continue;
    (is_inactive ? inactive : partial)++;
    const OptimalSetpoint s = solve_reduced(p, k, dstar);
    const OptimalSetpoint oracle = brute_force_oracle(k, p, dstar);
    worst_gap = std::max(worst_gap, std::abs(s.objective - oracle.objective));
    worst_kkt = std::max(worst_kkt, check_kkt(s, k, p, dstar).max_residual());
  }
  const bool pass = inactive == 25 && partial == 25 && worst_gap < 1e-6 && worst_kkt < 1e-8;
  return {pass, fmt::format("{} inactive + {} constrained instances, n<=5, objective gap "
                            "{:.2e} [<1e-6], KKT residual {:.2e} [<1e-8]",
                            inactive, partial, worst_gap, worst_kkt)};
}

Outcome closed_loop_regulation() {
  const cli::ConfigDocument doc = cli::load_config(kFixture);
  const WorkloadTrace trace = generate_trace(doc.params, doc.trace);
  const SimulationRecord rec = run(doc.params, trace, doc.sim);
  double max_conv = 0.0;
  double max_band = 0.0;
  double max_rise = 0.0;
  double max_cons = 0.0;
  int unsettled = 0;
  for (const IntervalMetrics& m : rec.intervals) {
    const double length = m.end - m.start;
    if (!m.convergence_time || *m.convergence_time >= length) {
      ++unsettled;
    } else {
      max_conv = std::max(max_conv, *m.convergence_time);
    }
    max_band = std::max(max_band, m.max_deviation);
    max_rise = std::max(max_rise, m.certificate_rise);
    max_cons = std::max(max_cons, m.conservation_error);
  }
  const bool pass = unsettled == 0 && max_band < 0.5 && max_rise <= 1e-6 && max_cons <= 1e-9;
  return {pass,
          fmt::format("{} intervals: (a) {} unsettled, slowest settle {:.1f} s [<450 s; "
                      "36 s reported, not asserted] (b) max |Tout-Tout_bar| {:.4f} degC [<0.5] "
                      "(c) certificate rise {:.2e} [<=1e-6] (d) conservation {:.2e} [<=1e-9]",
                      rec.intervals.size(), unsettled, max_conv, max_band, max_rise, max_cons)};
}

Outcome integrator_order() {
  const testing::ScalarCase c;
  const double err = c.max_error(0.1, 10.0);
  const double coarse = c.max_error(0.4, 100.0);
  const double fine = c.max_error(0.2, 100.0);
  const double ratio = coarse / fine;
  const bool pass = err < 1e-8 && std::abs(ratio - 16.0) <= 1.5;
  return {pass, fmt::format("max error {:.2e} at dt=0.1 s over 100 steps [<1e-8], error ratio "
                            "dt 0.4 -> 0.2 = {:.2f} [16+-1.5]",
                            err, ratio)};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "thermoptic_acceptance";
  std::filesystem::create_directories(dir);
  const std::string out = (dir / "run.csv").string();
  const cli::RunReport r = cli::cmd_simulate({kFixture, out, {}, {}});
  const std::string produced = slurp(out);
  const std::string golden = slurp(kGolden);
  std::filesystem::remove_all(dir);
  if (r.exit_code != cli::kExitOk) {
    return {false, fmt::format("simulate exited {}", r.exit_code)};
  }
  return {!golden.empty() && produced == golden,
          fmt::format("{} bytes produced, {} bytes golden, {}", produced.size(), golden.size(),
                      produced == golden ? "identical" : "different")};
}

}  // namespace

int main() {
  criterion(1, "COP/CRAC power reproduction", 1.0, cop_reproduction);
  criterion(2, "steady-state identity suite", 5.0, identity_suite);
  criterion(3, "structural proofs", 10.0, structural_proofs);
  criterion(4, "optimizer-oracle equivalence", 30.0, oracle_equivalence);
  criterion(5, "closed-loop regulation", 60.0, closed_loop_regulation);
  criterion(6, "integrator order", 1.0, integrator_order);
  criterion(7, "golden-file determinism", 60.0, determinism);
  std::printf("%d of 7 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
