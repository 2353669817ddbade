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

#include <benchmark/benchmark.h>

#include "thermoptic/controller.hpp"
#include "thermoptic/model.hpp"
#include "thermoptic/optimizer.hpp"
#include "thermoptic/simulator.hpp"
#include "thermoptic/steady_state.hpp"
#include "thermoptic/trace.hpp"

namespace {

using namespace thermoptic;

DataCenterParams racks(int n) {
  return make_homogeneous_params(synthesize_gamma(n, 0.3, 1), 0.35, 8.0, 1728.0, 145.5, 20.0,
                                 30.0);
}

void BM_ComputeConstants(benchmark::State& state) {
  const auto p = racks(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(compute_constants(p));
}
BENCHMARK(BM_ComputeConstants)->Arg(10)->Arg(30)->Arg(100);

void BM_SolveLyapunov(benchmark::State& state) {
  const Matrix a = system_matrix_a(racks(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(solve_lyapunov(a));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SolveLyapunov)->Arg(10)->Arg(20)->Arg(30)->Arg(40)->Complexity();

void BM_SolveReduced(benchmark::State& state) {
  const auto p = racks(static_cast<int>(state.range(0)));
  const auto k = compute_constants(p);
  // Near capacity the active set is nonempty and the pivoting loop runs.
  const double dstar = 0.97 * p.capacity();
  for (auto _ : state) benchmark::DoNotOptimize(solve_reduced(p, k, dstar));
}
BENCHMARK(BM_SolveReduced)->Arg(10)->Arg(30)->Arg(100);

void BM_Step(benchmark::State& state) {
  const auto p = racks(static_cast<int>(state.range(0)));
  const auto k = compute_constants(p);
  const ControllerGains g = make_controller_gains(p);
  SystemState s = steady_state(k, p.tsafe, 0.5 * p.capacity());
  s.tout.array() += 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(step(p, g, s, 0.5));
}
BENCHMARK(BM_Step)->Arg(10)->Arg(30)->Arg(100);

void BM_RunOneHour(benchmark::State& state) {
  const auto p = racks(30);
  TraceOptions o;
  o.horizon_s = 3600.0;
  const WorkloadTrace trace = generate_trace(p, o);
  SimulationConfig cfg;
  cfg.sample_stride = 600;
  for (auto _ : state) benchmark::DoNotOptimize(run(p, trace, cfg));
}
BENCHMARK(BM_RunOneHour)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
