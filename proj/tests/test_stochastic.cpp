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

#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles/fixtures.hpp"
#include "sparsectl/error.hpp"
#include "sparsectl/stochastic.hpp"

using namespace sparsectl;

namespace {

StepRates zero_rates(int m) {
  return {Vector::Zero(m), Vector::Zero(m), Vector::Zero(m)};
}

}  // namespace

TEST(Step, ZeroRatesLeaveStateAlone) {
  const IndexMap index(3);
  const StochasticState st{{1, 2, 3, 4, 5, 6}, {10, 20, 30}};
  Engine rng(1);
  std::vector<double> acc;
  StepStats stats;
  const StochasticState next = step(st, index, zero_rates(6), 0.1, rng, acc, &stats);
  EXPECT_EQ(next.f, st.f);
  EXPECT_EQ(next.v, st.v);
  EXPECT_EQ(stats.truncated, 0);
}

TEST(Step, ConservesFleetAndStaysNonNegative) {
  const IndexMap index(4);
  std::mt19937_64 gen(2);
  StepRates rates{fixture::random_matrix(12, 1, gen, 0.0, 30.0),
                  fixture::random_matrix(12, 1, gen, 0.0, 20.0),
                  fixture::random_matrix(12, 1, gen, 0.5, 3.0)};
  StochasticState st{std::vector<std::int64_t>(12, 0), {5, 0, 12, 3}};
  const std::int64_t total = st.total();
  Engine rng(3);
  std::vector<double> acc;
  StepStats stats;
  for (int k = 0; k < 2000; ++k) {
    st = step(st, index, rates, 0.02, rng, acc, &stats);
    ASSERT_EQ(st.total(), total);
    for (auto x : st.v) ASSERT_GE(x, 0);
    for (auto x : st.f) ASSERT_GE(x, 0);
  }
  EXPECT_GT(stats.truncated, 0);  // the rates outrun a fleet of 20
}

TEST(Step, DemandDeparturesArePoisson) {
  const IndexMap index(2);
  const double g = 5.0;
  const double delta = 0.02;
  StepRates rates = zero_rates(2);
  rates.g[index.index(0, 1)] = g;
  Engine rng(4);
  std::vector<double> acc;
  const int draws = 20000;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < draws; ++i) {
    const StochasticState next = step({{0, 0}, {0, 1000000}}, index, rates, delta, rng, acc);
    const double x = static_cast<double>(next.f[index.index(0, 1)]);
    sum += x;
    sq += x * x;
  }
  const double mean = sum / draws;
  const double var = sq / draws - mean * mean;
  EXPECT_LE(std::abs(mean - g * delta), 4.0 * std::sqrt(g * delta / draws));
  EXPECT_NEAR(var / (g * delta), 1.0, 0.05);
}

TEST(Step, ArrivalsAreBinomial) {
  const IndexMap index(2);
  StepRates rates = zero_rates(2);
  rates.gamma.setConstant(2.0);
  std::vector<double> acc;
  double last = 0.0;
  for (double delta : {0.005, 0.02, 0.1}) {
    Engine rng(5);
    const std::int64_t n = 1000000;
    const StochasticState next = step({{n, 0}, {0, 0}}, index, rates, delta, rng, acc);
    const double arrived = static_cast<double>(n - next.f[0]);
    const double p = 1.0 - std::exp(-2.0 * delta);
    EXPECT_LE(std::abs(arrived - n * p), 5.0 * std::sqrt(n * p * (1.0 - p))) << delta;
    EXPECT_GT(arrived, last);
    last = arrived;
  }
}

TEST(Step, StationaryInTransitMean) {
  const IndexMap index(2);
  StepRates rates = zero_rates(2);
  rates.gamma.setConstant(1.0);
  rates.g[index.index(1, 0)] = 10.0;
  StochasticState st{{0, 0}, {std::int64_t{1} << 40, 0}};
  Engine rng(6);
  std::vector<double> acc;
  double sum = 0.0;
  const int burn = 2000;
  const int steps = 500000;
  for (int k = 0; k < burn + steps; ++k) {
    st = step(st, index, rates, 0.01, rng, acc);
    st.v[0] = std::int64_t{1} << 40;
    if (k >= burn) sum += static_cast<double>(st.f[index.index(1, 0)]);
  }
  EXPECT_NEAR(sum / steps, 10.0, 0.2);
}

TEST(Step, AccumulatorReleasesWholeVehicles) {
  const IndexMap index(2);
  StepRates rates = zero_rates(2);
  rates.u[index.index(0, 1)] = 25.0;  // a quarter vehicle per step at delta 0.01
  StochasticState st{{0, 0}, {0, 100}};
  Engine rng(7);
  std::vector<double> acc;
  for (int k = 1; k <= 40; ++k) {
    st = step(st, index, rates, 0.01, rng, acc);
    EXPECT_EQ(st.f[index.index(0, 1)], k / 4) << k;
  }
}

TEST(Step, RefusedRequestsAreCounted) {
  const IndexMap index(3);
  StepRates rates = zero_rates(6);
  rates.u[index.index(1, 0)] = 300.0;
  rates.u[index.index(2, 0)] = 200.0;
  Engine rng(8);
  std::vector<double> acc;
  StepStats stats;
  const StochasticState next = step({std::vector<std::int64_t>(6, 0), {2, 0, 0}}, index,
                                    rates, 0.01, rng, acc, &stats);
  EXPECT_EQ(stats.truncated, 3);
  EXPECT_TRUE(stats.large_rate);
  EXPECT_EQ(next.v[0], 0);
  EXPECT_EQ(next.f[index.index(1, 0)] + next.f[index.index(2, 0)], 2);
}

TEST(Step, NegativeRatesAreClamped) {
  const IndexMap index(2);
  StepRates rates = zero_rates(2);
  rates.g[0] = -3.0;
  rates.u[1] = -0.5;
  Engine rng(9);
  std::vector<double> acc;
  StepStats stats;
  const StochasticState next = step({{0, 0}, {10, 10}}, index, rates, 0.1, rng, acc, &stats);
  EXPECT_NEAR(stats.clamped_demand, 0.3, 1e-15);
  EXPECT_NEAR(stats.clamped_control, 0.05, 1e-15);
  EXPECT_EQ(next.v, (std::vector<std::int64_t>{10, 10}));
}

TEST(Step, RejectsBadShapes) {
  const IndexMap index(3);
  Engine rng(10);
  std::vector<double> acc;
  EXPECT_THROW(step({{0, 0}, {1, 1}}, index, zero_rates(6), 0.1, rng, acc), Error);
  EXPECT_THROW(step({std::vector<std::int64_t>(6, 0), {1, 1, 1}}, index, zero_rates(2), 0.1,
                    rng, acc),
               Error);
  EXPECT_THROW(step({std::vector<std::int64_t>(6, 0), {1, 1, 1}}, index, zero_rates(6), 0.0,
                    rng, acc),
               Error);
}

TEST(Seeds, SplitSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t r = 0; r < 1000; ++r) seen.insert(split_seed(42, r));
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_EQ(split_seed(42, 7), split_seed(42, 7));
  EXPECT_NE(split_seed(42, 7), split_seed(43, 7));
}

TEST(MonteCarlo, MatchesOdeOnThreeStations) {
  SimulationInput input;
  input.scenario = fixture::three_station();
  input.source = RateSource::kBase;
  SimulationConfig config;
  config.delta = input.scenario.horizon_hours / 400.0;
  config.runs = 300;
  config.seed = 11;
  const MonteCarloSummary r = run_monte_carlo(input, config);
  EXPECT_EQ(r.runs, 300);
  EXPECT_EQ(r.times.size(), 401u);
  EXPECT_EQ(r.components.size(), 9u);
  EXPECT_EQ(r.mean.rows(), 9);
  EXPECT_EQ(r.mean.cols(), 401);
  EXPECT_TRUE(r.consistent(5.0)) << r.max_abs_z;
  // Fleet is conserved in every run, so the mean is too.
  for (Eigen::Index k = 0; k < r.mean.cols(); ++k) {
    EXPECT_NEAR(r.mean.col(k).sum(), 180.0, 1e-9);
    EXPECT_NEAR(r.ode.col(k).sum(), 180.0, 1e-8);
  }
}

TEST(MonteCarlo, DeterministicForSeed) {
  SimulationInput input;
  input.scenario = fixture::three_station();
  input.source = RateSource::kExplicit;
  input.g = Vector::Constant(6, 1.0);
  SimulationConfig config;
  config.delta = 0.05;
  config.runs = 20;
  config.seed = 12;
  const MonteCarloSummary a = run_monte_carlo(input, config);
  const MonteCarloSummary b = run_monte_carlo(input, config);
  EXPECT_EQ(a.mean, b.mean);
  EXPECT_EQ(a.variance, b.variance);
  config.seed = 13;
  EXPECT_NE(run_monte_carlo(input, config).mean, a.mean);
}

TEST(MonteCarlo, RejectsBadConfig) {
  SimulationInput input;
  input.scenario = fixture::three_station();
  input.source = RateSource::kBase;
  SimulationConfig config;
  config.runs = 0;
  EXPECT_THROW(run_monte_carlo(input, config), Error);
  config.runs = 1;
  config.delta = -1.0;
  EXPECT_THROW(run_monte_carlo(input, config), Error);
}

TEST(MonteCarlo, SummaryCsv) {
  SimulationInput input;
  input.scenario = fixture::three_station();
  input.source = RateSource::kBase;
  SimulationConfig config;
  config.delta = 1.0;
  config.runs = 4;
  const MonteCarloSummary r = run_monte_carlo(input, config);
  std::ostringstream out;
  write_summary_csv(r, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "t,component,mc_mean,mc_se,ode_value,zscore");
  int rows = 0;
  while (std::getline(in, line)) {
    if (!line.empty()) ++rows;
  }
  EXPECT_EQ(rows, 5 * 9);
}
