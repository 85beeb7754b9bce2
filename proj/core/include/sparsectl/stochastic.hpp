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

#ifndef SPARSECTL_STOCHASTIC_HPP_
#define SPARSECTL_STOCHASTIC_HPP_

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

#include "sparsectl/mobility.hpp"
#include "sparsectl/numerics.hpp"

namespace sparsectl {

// Integer fleet state: in-transit counts per route, parked counts per station.
struct StochasticState {
  std::vector<std::int64_t> f;
  std::vector<std::int64_t> v;

  std::int64_t total() const;
  Vector as_vector() const;  // [v, f], the ODE state layout
};

struct StepRates {
  Vector g;      // customer demand per route (negative values are clamped)
  Vector u;      // rebalancing rate per route
  Vector gamma;  // arrival rate per route
};

// Bookkeeping for one or more steps.
struct StepStats {
  std::int64_t truncated = 0;  // departure requests refused for lack of vehicles
  double clamped_demand = 0;   // sum of max(-g, 0) * delta
  double clamped_control = 0;  // sum of max(-u, 0) * delta
  bool large_rate = false;     // some rate * delta exceeded 1

  void merge(const StepStats& other);
};

using Engine = std::mt19937_64;

// Seed of run `run` derived from the master seed through SplitMix64.
std::uint64_t split_seed(std::uint64_t seed, std::uint64_t run);
std::uint64_t splitmix64(std::uint64_t& state);

// One step of length delta. `accumulator` holds the fractional part of the
// rebalancing departures per route and is updated in place.
StochasticState step(const StochasticState& state, const IndexMap& index,
                     const StepRates& rates, double delta, Engine& rng,
                     std::vector<double>& accumulator, StepStats* stats = nullptr);

enum class RateSource {
  kExplicit,  // constant g given in SimulationInput::g
  kBase,      // constant g = gbar
  kPricing,   // g from the pricing rule on the current parked counts
};

struct SimulationInput {
  MobilityScenario scenario;
  RateSource source = RateSource::kPricing;
  Vector g;         // kExplicit only
  Matrix u;         // optional rebalancing rates, rows on u_grid
  TimeGrid u_grid;  // grid of u (horizon must match the scenario)
};

struct SimulationConfig {
  double delta = 0.01;
  int runs = 100;
  std::uint64_t seed = 1;
  double z_threshold = 5.0;
};

struct MonteCarloSummary {
  std::vector<double> times;  // knot times, one per simulation step + 1
  std::vector<std::string> components;
  Matrix mean;  // n x knots
  Matrix variance;
  Matrix std_error;  // floored at frac(ode)(1 - frac(ode)) / runs
  Matrix ode;
  Matrix zscore;
  double max_abs_z = 0;
  double rms_deviation = 0;  // RMS of (mean - ode) over knots and components
  StepStats stats;
  int runs = 0;

  bool consistent(double z_threshold) const {
    return max_abs_z <= z_threshold && stats.truncated == 0;
  }
};

MonteCarloSummary run_monte_carlo(const SimulationInput& input,
                                  const SimulationConfig& config);

// Columns: t, component, mc_mean, mc_se, ode_value, zscore.
void write_summary_csv(const MonteCarloSummary& summary, std::ostream& out);

}  // namespace sparsectl

#endif  // SPARSECTL_STOCHASTIC_HPP_
