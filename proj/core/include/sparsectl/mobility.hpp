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

#ifndef SPARSECTL_MOBILITY_HPP_
#define SPARSECTL_MOBILITY_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include "sparsectl/lp.hpp"
#include "sparsectl/numerics.hpp"

namespace sparsectl {

struct Station {
  int id = 0;  // 1-based
  double x_km = 0;
  double y_km = 0;
  double initial = 0;  // parked vehicles at t = 0
};

// equalize: parked counts equal at T, in-transit free.
// stations: parked counts equal `stations`, in-transit free.
// full: whole state pinned (parked = `stations`, in-transit = `in_transit`).
enum class TargetMode { kEqualize, kStations, kFull };

const char* to_string(TargetMode mode);
TargetMode parse_target_mode(const std::string& text);

struct TerminalTarget {
  TargetMode mode = TargetMode::kEqualize;
  Vector stations;    // s entries; empty means an equal split of the fleet
  Vector in_transit;  // m entries in pair order; empty means zeros
};

// Pair-indexed vectors follow IndexMap order. Rates are per hour.
struct MobilityScenario {
  std::vector<Station> stations;
  double horizon_hours = 4.0;
  int beta = 10;
  Vector gamma;   // arrival rate 1/tau of each route
  Vector theta;   // price elasticity
  Vector lambda;  // price adjustment
  Vector gbar;    // base demand
  TerminalTarget target;

  int num_stations() const { return static_cast<int>(stations.size()); }
  double fleet() const;
  Vector initial_state() const;  // parked counts, zero in transit
  Vector nominal_target() const;
  void validate() const;
};

// Route (i, j) means "to i from j"; 0-based here, printed 1-based.
class IndexMap {
 public:
  explicit IndexMap(int s);

  int stations() const { return s_; }
  int pairs() const { return static_cast<int>(pairs_.size()); }
  int state_dim() const { return s_ * s_; }
  const std::pair<int, int>& pair(int p) const { return pairs_.at(p); }
  int index(int i, int j) const;
  int state_of_pair(int p) const { return s_ + p; }

 private:
  int s_;
  std::vector<std::pair<int, int>> pairs_;
};

IndexMap build_index_map(int s);

// Customer flow with pricing-coupled demand. State [v_1..v_s, f_pairs].
SystemMatrices build_system_matrices(const MobilityScenario& scenario,
                                     const IndexMap& index, double t = 0.0);
// Same layout with the pricing terms dropped (pure travel dynamics).
SystemMatrices build_transit_matrices(const MobilityScenario& scenario,
                                      const IndexMap& index, double t = 0.0);

struct MobilityModel {
  MobilityScenario scenario;
  IndexMap index;
  LtvSystem system;
};

MobilityModel build_model(const MobilityScenario& scenario);

struct Demand {
  Vector g;      // effective demand per route
  Vector price;  // p_ij
  int negative = 0;
};

Demand effective_demand(const MobilityScenario& scenario, const IndexMap& index,
                        const Vector& x, double t = 0.0);

// Rows c * x(T) = d encoding the scenario target.
struct TerminalConstraint {
  Matrix c;
  Vector d;
  Vector nominal;  // reference state used for residual scaling
};

TerminalConstraint terminal_constraint(const MobilityScenario& scenario,
                                       const IndexMap& index);

struct ScenarioConfig {
  double radius_km = 20.0;
  double total_vehicles = 200.0;
  double coef_low = 0.0;
  double coef_high = 0.3;
  double theta_min = 0.01;
  double speed_kmh = 30.0;
  double min_distance_km = 1.0;
  // Congestion multiplier 1 + peak * exp(-|mid|^2 / (2 width^2)) at the
  // segment midpoint.
  double congestion_peak = 1.0;
  double congestion_width_km = 8.0;
  double gbar_low = 0.5;
  double gbar_high = 2.0;
  // Station weights 1 + spread * U(-1, 1) before the integer split.
  double initial_spread = 0.9;
  bool symmetric_lambda = true;
  double horizon_hours = 4.0;
  int beta = 10;
  TargetMode target = TargetMode::kEqualize;
};

MobilityScenario generate_random_scenario(int s, std::uint64_t seed,
                                          const ScenarioConfig& config = {});

double congestion_at(const ScenarioConfig& config, double x_km, double y_km);

// Relaxed staff-team extension. Variables, in order: aggregate moves u
// (K x m), per-team moves (teams x K x m), per-team staff trips
// (teams x K x m). Index helpers below.
struct StaffProblem {
  LinearProgram lp;
  int steps = 0;
  int pairs = 0;
  int teams = 0;
  int dominance_rows = 0;  // trip >= move rows
  int capacity_rows = 0;   // one trip per team and step
  int parked_rows = 0;     // staff parked counts >= 0

  int aggregate(int k, int p) const { return k * pairs + p; }
  int team_move(int team, int k, int p) const {
    return steps * pairs + (team * steps + k) * pairs + p;
  }
  int team_trip(int team, int k, int p) const {
    return steps * pairs * (1 + teams) + (team * steps + k) * pairs + p;
  }
};

struct StaffConfig {
  int max_variables = 60000;
  // Station each team starts at; empty means team k starts at k mod s.
  std::vector<int> start_station;
};

StaffProblem build_staff_problem(const MobilityScenario& scenario,
                                 const TimeGrid& grid,
                                 const StaffConfig& config = {});

}  // namespace sparsectl

#endif  // SPARSECTL_MOBILITY_HPP_
