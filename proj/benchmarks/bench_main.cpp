// Copyright 2026 The sparsectl Authors
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

#include "sparsectl/mobility.hpp"
#include "sparsectl/numerics.hpp"
#include "sparsectl/rebalance.hpp"
#include "sparsectl/scheduling.hpp"
#include "sparsectl/stochastic.hpp"

using namespace sparsectl;

namespace {

ScheduleInstance four_node() {
  ScheduleInstance in;
  in.system.a.resize(4, 4);
  in.system.a << -0.6, 0.0, -0.6, 0.2, -0.5, 0.0, 0.0, 0.4, 1.0, 0.6, 0.0, 0.5,
      0.0, 0.0, 0.9, -0.3;
  in.system.b = Matrix::Identity(4, 4);
  in.system.horizon = 1.0;
  in.alpha = Vector::Constant(4, 0.4);
  in.beta = 2;
  return in;
}

void BM_MatrixExponential(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = Matrix::Random(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(matrix_exponential(a, 1.0));
}
BENCHMARK(BM_MatrixExponential)->Arg(4)->Arg(25)->Arg(100);

void BM_ScheduleLp(benchmark::State& state) {
  const ScheduleInstance in = four_node();
  const TimeGrid grid(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_relaxed_schedule(in, grid));
}
BENCHMARK(BM_ScheduleLp)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_ScheduleDual(benchmark::State& state) {
  const ScheduleInstance in = four_node();
  const TimeGrid grid(1.0, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(solve_schedule_dual(in, grid));
}
BENCHMARK(BM_ScheduleDual)->Arg(400)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_Reachability(benchmark::State& state) {
  const MobilityModel model =
      build_model(generate_random_scenario(static_cast<int>(state.range(0)), 1));
  const TimeGrid grid(model.scenario.horizon_hours, 96);
  for (auto _ : state) benchmark::DoNotOptimize(discretize_reachability(model.system, grid));
}
BENCHMARK(BM_Reachability)->Arg(5)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_StochasticStep(benchmark::State& state) {
  const MobilityScenario sc = generate_random_scenario(10, 1);
  const IndexMap index(10);
  StochasticState st;
  st.v.assign(10, 20);
  st.f.assign(index.pairs(), 0);
  StepRates rates{sc.gbar, Vector::Zero(index.pairs()), sc.gamma};
  std::vector<double> acc;
  Engine rng(1);
  for (auto _ : state) {
    st = step(st, index, rates, 0.01, rng, acc);
    benchmark::DoNotOptimize(st);
  }
}
BENCHMARK(BM_StochasticStep);

}  // namespace
BENCHMARK_MAIN();
