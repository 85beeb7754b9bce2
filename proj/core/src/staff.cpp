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

#include <string>

#include "sparsectl/error.hpp"
#include "sparsectl/mobility.hpp"
#include "sparsectl/rebalance.hpp"

namespace sparsectl {

StaffProblem build_staff_problem(const MobilityScenario& scenario,
                                 const TimeGrid& grid, const StaffConfig& config) {
  const MobilityModel model = build_model(scenario);
  const int s = model.index.stations();
  const int m = model.index.pairs();
  const int n = model.index.state_dim();
  const int K = grid.steps();
  const int teams = scenario.beta;
  const long long nv_long = static_cast<long long>(K) * m * (1 + 2LL * teams);
  if (nv_long > config.max_variables) {
    fail(ErrorKind::kInvalidArgument,
         "staff problem too large: " + std::to_string(nv_long) + " variables for " +
             std::to_string(s) + " stations and " + std::to_string(teams) + " teams");
  }
  require(config.start_station.empty() ||
              static_cast<int>(config.start_station.size()) == teams,
          ErrorKind::kDimensionMismatch, "one start station per team expected");

  StaffProblem sp;
  sp.steps = K;
  sp.pairs = m;
  sp.teams = teams;
  const int nv = static_cast<int>(nv_long);
  const double dt = grid.dt();
  sp.lp = LinearProgram(nv);
  LinearProgram& lp = sp.lp;
  lp.upper.setOnes();
  for (int k = 0; k < K; ++k) {
    for (int p = 0; p < m; ++p) {
      lp.c[sp.aggregate(k, p)] = dt;
      lp.upper[sp.aggregate(k, p)] = teams;
      for (int t = 0; t < teams; ++t) lp.c[sp.team_trip(t, k, p)] = dt;
    }
  }

  // Customer terminal rows plus the coupling u = sum of team moves.
  const RebalanceInstance inst = make_rebalance_instance(model);
  const ReachabilityDiscretization disc = discretize_reachability(inst.system, grid);
  const int trows = static_cast<int>(inst.target.c.rows());
  lp.a_eq = Matrix::Zero(trows + K * m, nv);
  lp.b_eq = Vector::Zero(trows + K * m);
  lp.b_eq.head(trows) = inst.target.d - inst.target.c * (disc.phi_total * inst.x0);
  for (int k = 0; k < K; ++k) {
    lp.a_eq.block(0, sp.aggregate(k, 0), trows, m) = inst.target.c * disc.blocks[k];
    for (int p = 0; p < m; ++p) {
      const int row = trows + k * m + p;
      lp.a_eq(row, sp.aggregate(k, p)) = 1.0;
      for (int t = 0; t < teams; ++t) lp.a_eq(row, sp.team_move(t, k, p)) = -1.0;
    }
  }

  // Staff cars follow the travel dynamics without pricing.
  const SystemMatrices transit = build_transit_matrices(scenario, model.index);
  LtvSystem staff;
  staff.state_dim = n;
  staff.input_dim = m;
  staff.horizon = grid.horizon();
  staff.time_invariant = true;
  staff.provider = [transit](double) { return transit; };
  const StepMap step = zero_order_hold_maps(staff, grid).front();
  // lag[d] = parked rows of Ad^d Bd; drift[k] = Ad^k.
  std::vector<Matrix> lag(K);
  std::vector<Matrix> drift(K + 1);
  drift[0] = Matrix::Identity(n, n);
  for (int k = 1; k <= K; ++k) drift[k] = step.state_map * drift[k - 1];
  for (int d = 0; d < K; ++d) lag[d] = (drift[d] * step.input_map).topRows(s);

  sp.dominance_rows = teams * K * m;
  sp.capacity_rows = teams * K;
  sp.parked_rows = teams * K * s;
  const int nin = sp.dominance_rows + sp.capacity_rows + sp.parked_rows;
  lp.a_in = Matrix::Zero(nin, nv);
  lp.b_in = Vector::Zero(nin);
  int row = 0;
  for (int t = 0; t < teams; ++t) {
    for (int k = 0; k < K; ++k) {
      for (int p = 0; p < m; ++p, ++row) {
        lp.a_in(row, sp.team_move(t, k, p)) = 1.0;
        lp.a_in(row, sp.team_trip(t, k, p)) = -1.0;
      }
    }
  }
  for (int t = 0; t < teams; ++t) {
    for (int k = 0; k < K; ++k, ++row) {
      for (int p = 0; p < m; ++p) lp.a_in(row, sp.team_trip(t, k, p)) = 1.0;
      lp.b_in[row] = 1.0;
    }
  }
  for (int t = 0; t < teams; ++t) {
    const int start = config.start_station.empty() ? t % s : config.start_station[t];
    require(start >= 0 && start < s, ErrorKind::kInvalidArgument,
            "staff start station out of range");
    Vector x0 = Vector::Zero(n);
    x0[start] = 1.0;
    for (int k = 1; k <= K; ++k) {
      const Vector free_parked = (drift[k] * x0).head(s);
      for (int i = 0; i < s; ++i, ++row) {
        for (int l = 0; l < k; ++l) {
          for (int p = 0; p < m; ++p) {
            lp.a_in(row, sp.team_trip(t, l, p)) = -lag[k - 1 - l](i, p);
          }
        }
        lp.b_in[row] = free_parked[i];
      }
    }
  }
  return sp;
}

}  // namespace sparsectl
