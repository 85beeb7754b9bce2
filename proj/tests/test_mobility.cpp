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
#include <random>

#include <gtest/gtest.h>

#include "oracles/fixtures.hpp"
#include "sparsectl/error.hpp"
#include "sparsectl/mobility.hpp"
#include "sparsectl/rebalance.hpp"

using namespace sparsectl;

namespace {

// Direct evaluation of the flow equations, route by route.
Vector flow_rhs(const MobilityScenario& sc, const IndexMap& index, const Vector& x,
                const Vector& u) {
  const int s = index.stations();
  Vector dx = Vector::Zero(x.size());
  for (int p = 0; p < index.pairs(); ++p) {
    const auto [i, j] = index.pair(p);
    const int back = index.index(j, i);
    const double g = -sc.theta[p] * (sc.lambda[p] * x[i] - sc.lambda[back] * x[j]);
    const double f = x[s + p];
    dx[s + p] += -sc.gamma[p] * f + g + u[p];
    dx[i] += sc.gamma[p] * f;
    dx[j] -= g + u[p];
  }
  return dx;
}

MobilityScenario with_pricing(MobilityScenario sc, std::mt19937_64& rng) {
  const int m = static_cast<int>(sc.gamma.size());
  sc.theta = fixture::random_matrix(m, 1, rng, 0.05, 0.3);
  sc.lambda = fixture::random_matrix(m, 1, rng, 0.0, 0.3);
  return sc;
}

}  // namespace

TEST(IndexMap, TwoStations) {
  const IndexMap idx = build_index_map(2);
  EXPECT_EQ(idx.pairs(), 2);
  EXPECT_EQ(idx.state_dim(), 4);
  EXPECT_EQ(idx.pair(0), std::make_pair(0, 1));
  EXPECT_EQ(idx.pair(1), std::make_pair(1, 0));
}

TEST(IndexMap, ThreeStationsOrder) {
  const IndexMap idx(3);
  const std::vector<std::pair<int, int>> expected = {{0, 1}, {0, 2}, {1, 0},
                                                     {1, 2}, {2, 0}, {2, 1}};
  ASSERT_EQ(idx.pairs(), 6);
  for (int p = 0; p < 6; ++p) EXPECT_EQ(idx.pair(p), expected[p]);
}

TEST(IndexMap, TenStationsRoundTrip) {
  const IndexMap idx(10);
  EXPECT_EQ(idx.pairs(), 90);
  EXPECT_EQ(idx.state_dim(), 100);
  for (int p = 0; p < idx.pairs(); ++p) {
    const auto [i, j] = idx.pair(p);
    EXPECT_EQ(idx.index(i, j), p);
    EXPECT_EQ(idx.state_of_pair(p), 10 + p);
  }
  EXPECT_THROW(idx.index(3, 3), Error);
  EXPECT_THROW(IndexMap(1), Error);
}

TEST(SystemMatrices, TwoStationHandExpansion) {
  MobilityScenario sc = fixture::two_station();
  sc.gamma << 1.1, 2.3;    // gamma_12, gamma_21
  sc.theta << 0.3, 0.7;    // theta_12, theta_21
  sc.lambda << 0.05, 0.13;  // lambda_12, lambda_21
  const SystemMatrices mats = build_system_matrices(sc, IndexMap(2));
  // State [v1, v2, f12, f21]; f12 travels to station 1 from station 2.
  Matrix a(4, 4);
  a << -0.7 * 0.05, 0.7 * 0.13, 1.1, 0.0,
       0.3 * 0.05, -0.3 * 0.13, 0.0, 2.3,
       -0.3 * 0.05, 0.3 * 0.13, -1.1, 0.0,
       0.7 * 0.05, -0.7 * 0.13, 0.0, -2.3;
  Matrix b(4, 2);
  b << 0.0, -1.0,
       -1.0, 0.0,
       1.0, 0.0,
       0.0, 1.0;
  EXPECT_LT((mats.a - a).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(mats.b, b);
}

TEST(SystemMatrices, ThreeStationFiniteDifference) {
  std::mt19937_64 rng(41);
  const MobilityScenario sc = with_pricing(fixture::three_station(), rng);
  const MobilityModel model = build_model(sc);
  Vector x0 = fixture::random_matrix(9, 1, rng, 5.0, 60.0);
  const Vector u = fixture::random_matrix(6, 1, rng, 0.0, 1.0);
  const Vector rhs = flow_rhs(sc, model.index, x0, u);
  // Richardson-extrapolated forward difference of the propagated state.
  const auto slope = [&](double h) {
    const Matrix x = propagate_state(model.system, x0, u.transpose(), TimeGrid(h, 1));
    return Vector((x.col(1) - x0) / h);
  };
  const double h = 1e-5;
  const Vector fd = 2.0 * slope(h / 2) - slope(h);
  EXPECT_LT((fd - rhs).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(SystemMatrices, ColumnsConserveVehicles) {
  for (int s : {2, 3, 5, 10}) {
    const MobilityScenario sc = generate_random_scenario(s, 40 + s);
    const SystemMatrices mats = build_system_matrices(sc, IndexMap(s));
    const double scale = mats.a.cwiseAbs().maxCoeff();
    EXPECT_LE(mats.a.colwise().sum().cwiseAbs().maxCoeff(), 16 * 2.3e-16 * scale) << s;
    EXPECT_EQ(mats.b.colwise().sum().cwiseAbs().maxCoeff(), 0.0) << s;
  }
}

TEST(SystemMatrices, TransitDropsPricing) {
  std::mt19937_64 rng(42);
  const MobilityScenario sc = with_pricing(fixture::three_station(), rng);
  MobilityScenario flat = sc;
  flat.lambda.setZero();
  const IndexMap idx(3);
  EXPECT_EQ(build_transit_matrices(sc, idx).a, build_system_matrices(flat, idx).a);
}

TEST(SystemMatrices, DriftKeepsFleetConstant) {
  const MobilityScenario sc = generate_random_scenario(10, 43);
  const MobilityModel model = build_model(sc);
  const TimeGrid grid(sc.horizon_hours, 96);
  const Matrix x = propagate_state(model.system, sc.initial_state(),
                                   Matrix::Zero(96, model.index.pairs()), grid);
  for (int k = 0; k <= 96; ++k) EXPECT_NEAR(x.col(k).sum(), 200.0, 200.0 * 1e-8);
}

TEST(Demand, NoPriceAdjustmentMeansNoDemand) {
  MobilityScenario sc = fixture::three_station();
  const IndexMap idx(3);
  const Vector x = Vector::LinSpaced(9, 1.0, 9.0);
  const Demand d = effective_demand(sc, idx, x);
  EXPECT_EQ(d.g, Vector::Zero(6));
  EXPECT_EQ(d.price, sc.gbar.cwiseQuotient(sc.theta));
  EXPECT_EQ(d.negative, 0);
}

TEST(Demand, BalancedPricingCancels) {
  MobilityScenario sc = fixture::two_station();
  sc.lambda << 0.1, 0.3;
  Vector x = Vector::Zero(4);
  x << 30.0, 10.0, 0.0, 0.0;  // 0.1 * 30 == 0.3 * 10
  const Demand d = effective_demand(sc, IndexMap(2), x);
  EXPECT_NEAR(d.g[0], 0.0, 1e-15);
  EXPECT_NEAR(d.g[1], 0.0, 1e-15);
}

TEST(Demand, ImbalanceGivesNegativeDemand) {
  MobilityScenario sc = fixture::two_station();
  sc.lambda << 0.1, 0.1;
  Vector x = Vector::Zero(4);
  x << 30.0, 10.0, 0.0, 0.0;
  const IndexMap idx(2);
  const Demand d = effective_demand(sc, idx, x);
  EXPECT_NEAR(d.g[idx.index(0, 1)], -0.4, 1e-15);
  EXPECT_NEAR(d.g[idx.index(1, 0)], 0.4, 1e-15);
  EXPECT_EQ(d.negative, 1);
}

TEST(Demand, IndependentOfBaseDemand) {
  std::mt19937_64 rng(44);
  MobilityScenario sc = with_pricing(fixture::three_station(), rng);
  const IndexMap idx(3);
  const Vector x = fixture::random_matrix(9, 1, rng, 0.0, 50.0);
  const Demand before = effective_demand(sc, idx, x);
  sc.gbar *= 3.0;
  const Demand after = effective_demand(sc, idx, x);
  EXPECT_LT((before.g - after.g).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_GT((before.price - after.price).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Generator, EqualSplitTarget) {
  const MobilityScenario sc = generate_random_scenario(10, 45);
  EXPECT_EQ(sc.fleet(), 200.0);
  const Vector xd = sc.nominal_target();
  ASSERT_EQ(xd.size(), 100);
  EXPECT_EQ(xd.head(10), Vector::Constant(10, 20.0));
  EXPECT_EQ(xd.tail(90), Vector::Zero(90));
  EXPECT_EQ(sc.beta, 10);
  for (const Station& st : sc.stations) EXPECT_EQ(st.initial, std::round(st.initial));
}

TEST(Generator, Deterministic) {
  const MobilityScenario a = generate_random_scenario(5, 46);
  const MobilityScenario b = generate_random_scenario(5, 46);
  EXPECT_EQ(a.gamma, b.gamma);
  EXPECT_EQ(a.theta, b.theta);
  EXPECT_EQ(a.lambda, b.lambda);
  EXPECT_EQ(a.gbar, b.gbar);
  for (int i = 0; i < 5; ++i) {
    EXPECT_EQ(a.stations[i].x_km, b.stations[i].x_km);
    EXPECT_EQ(a.stations[i].initial, b.stations[i].initial);
  }
  EXPECT_NE(generate_random_scenario(5, 47).gamma, a.gamma);
}

TEST(Generator, RateInverselyProportionalToDistance) {
  ScenarioConfig cfg;
  cfg.congestion_peak = 0.0;
  const MobilityScenario sc = generate_random_scenario(8, 48, cfg);
  const IndexMap idx(8);
  for (int p = 0; p < idx.pairs(); ++p) {
    const auto [i, j] = idx.pair(p);
    const double dist = std::hypot(sc.stations[i].x_km - sc.stations[j].x_km,
                                   sc.stations[i].y_km - sc.stations[j].y_km);
    if (dist < cfg.min_distance_km) continue;
    // So doubling a distance halves the rate.
    EXPECT_NEAR(sc.gamma[p] * dist, cfg.speed_kmh, 1e-9);
  }
}

TEST(Generator, CoefficientRanges) {
  const MobilityScenario sc = generate_random_scenario(6, 49);
  EXPECT_GE(sc.theta.minCoeff(), 0.01);
  EXPECT_LE(sc.theta.maxCoeff(), 0.3);
  EXPECT_GE(sc.lambda.minCoeff(), 0.0);
  EXPECT_LE(sc.lambda.maxCoeff(), 0.3);
  EXPECT_GT(sc.gamma.minCoeff(), 0.0);
  EXPECT_NO_THROW(sc.validate());
}

TEST(Scenario, ValidationRejectsBadCoefficients) {
  MobilityScenario sc = fixture::three_station();
  sc.theta[2] = 0.0;
  EXPECT_THROW(sc.validate(), Error);
  sc = fixture::three_station();
  sc.gamma[0] = -1.0;
  EXPECT_THROW(sc.validate(), Error);
  sc = fixture::three_station();
  sc.beta = 6;
  EXPECT_THROW(sc.validate(), Error);
  sc = fixture::three_station();
  sc.lambda.resize(5);
  EXPECT_THROW(sc.validate(), Error);
}

TEST(TerminalConstraint, Modes) {
  MobilityScenario sc = fixture::three_station();
  const IndexMap idx(3);
  sc.target.mode = TargetMode::kEqualize;
  TerminalConstraint tc = terminal_constraint(sc, idx);
  EXPECT_EQ(tc.c.rows(), 2);
  EXPECT_EQ(tc.d, Vector::Zero(2));
  sc.target.mode = TargetMode::kFull;
  tc = terminal_constraint(sc, idx);
  EXPECT_EQ(tc.c, Matrix::Identity(9, 9));
  EXPECT_EQ(tc.d.head(3), Vector::Constant(3, 60.0));
  sc.target.mode = TargetMode::kStations;
  sc.target.stations = Vector::LinSpaced(3, 50.0, 70.0);
  tc = terminal_constraint(sc, idx);
  EXPECT_EQ(tc.d, sc.target.stations);
}

TEST(Staff, NothingToRebalanceCostsNothing) {
  MobilityScenario sc = fixture::two_station();
  sc.stations[0].initial = 20.0;
  sc.stations[1].initial = 20.0;
  const StaffProblem sp = build_staff_problem(sc, TimeGrid(sc.horizon_hours, 4));
  const LpSolution sol = solve_lp(sp.lp);
  ASSERT_TRUE(sol.optimal());
  EXPECT_NEAR(sol.objective, 0.0, 1e-12);
}

TEST(Staff, ConstraintCensus) {
  const MobilityScenario sc = fixture::three_station();
  const int K = 6;
  const StaffProblem sp = build_staff_problem(sc, TimeGrid(sc.horizon_hours, K));
  EXPECT_EQ(sp.dominance_rows, 6 * K * sc.beta);
  EXPECT_EQ(sp.capacity_rows, K * sc.beta);
  EXPECT_EQ(sp.parked_rows, K * sc.beta * 3);
  EXPECT_EQ(sp.lp.num_vars(), K * 6 * (1 + 2 * sc.beta));
  EXPECT_EQ(sp.lp.num_in(), sp.dominance_rows + sp.capacity_rows + sp.parked_rows);
  // Each dominance row pairs one move with its trip.
  for (int r = 0; r < sp.dominance_rows; ++r) {
    EXPECT_EQ(sp.lp.a_in.row(r).cwiseAbs().sum(), 2.0);
  }
}

TEST(Staff, SingleTeamOnTwoStations) {
  // One team has to shuttle back after every move, so give it time.
  const MobilityScenario sc = fixture::two_station(48.0);
  const TimeGrid grid(sc.horizon_hours, 12);
  const StaffProblem sp = build_staff_problem(sc, grid);
  const LpSolution staff = solve_lp(sp.lp);
  ASSERT_TRUE(staff.optimal());

  const RebalanceInstance inst = make_rebalance_instance(build_model(sc));
  const RebalanceResult single = solve_relaxed_rebalance(inst, grid);
  ASSERT_EQ(single.status, LpStatus::kOptimal);
  // Every move needs a trip of its own.
  EXPECT_GE(staff.objective, 2.0 * single.control.census.l1 - 1e-9);

  // Replay the team through the travel dynamics: it never parks below zero.
  const IndexMap idx(2);
  const SystemMatrices transit = build_transit_matrices(sc, idx);
  LtvSystem sys;
  sys.state_dim = 4;
  sys.input_dim = 2;
  sys.horizon = sc.horizon_hours;
  sys.time_invariant = true;
  sys.provider = [transit](double) { return transit; };
  Matrix trips(grid.steps(), 2);
  Matrix moves(grid.steps(), 2);
  for (int k = 0; k < grid.steps(); ++k) {
    for (int p = 0; p < 2; ++p) {
      trips(k, p) = staff.z[sp.team_trip(0, k, p)];
      moves(k, p) = staff.z[sp.team_move(0, k, p)];
      EXPECT_NEAR(staff.z[sp.aggregate(k, p)], moves(k, p), 1e-9);
    }
    EXPECT_LE(trips.row(k).sum(), 1.0 + 1e-9);
  }
  EXPECT_GE((trips - moves).minCoeff(), -1e-9);
  Vector start = Vector::Zero(4);
  start[0] = 1.0;
  const Matrix team = propagate_state(sys, start, trips, grid);
  EXPECT_GE(team.topRows(2).minCoeff(), -1e-9);
}

TEST(Staff, SizeGuard) {
  const MobilityScenario sc = generate_random_scenario(10, 50);
  StaffConfig cfg;
  cfg.max_variables = 1000;
  EXPECT_THROW(build_staff_problem(sc, TimeGrid(4.0, 96), cfg), Error);
}
