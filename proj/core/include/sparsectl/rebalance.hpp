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

#ifndef SPARSECTL_REBALANCE_HPP_
#define SPARSECTL_REBALANCE_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "sparsectl/lp.hpp"
#include "sparsectl/mobility.hpp"
#include "sparsectl/numerics.hpp"

namespace sparsectl {

enum class BoundsMode { kNonNegative, kSigned };

struct RebalanceInstance {
  LtvSystem system;
  Vector x0;
  TerminalConstraint target;  // c * x(T) = d
  int beta = 1;
  BoundsMode bounds = BoundsMode::kNonNegative;

  void validate() const;
};

RebalanceInstance make_rebalance_instance(const MobilityModel& model,
                                          BoundsMode bounds = BoundsMode::kNonNegative);

// x(T) = phi_total * x0 + sum_k blocks[k] * u_k for piecewise-constant u.
struct ReachabilityDiscretization {
  TimeGrid grid;
  Matrix phi_total;
  std::vector<Matrix> blocks;
  std::vector<StepMap> maps;

  Vector terminal_state(const Vector& x0, const Matrix& u) const;
};

ReachabilityDiscretization discretize_reachability(const LtvSystem& system,
                                                   const TimeGrid& grid);

struct CostCensus {
  Vector l0_channel;  // time each channel is nonzero
  double l0 = 0;
  double l1 = 0;
  int l0_step_max = 0;
  double l1_step_max = 0;
};

// Cells with |u| > zero_tol count as active.
CostCensus cost_census(const Matrix& u, const TimeGrid& grid, double zero_tol = 1e-9);

struct ControlTrajectory {
  TimeGrid grid;
  Matrix u;  // K x m
  CostCensus census;
  double terminal_residual = 0;  // |c x(T) - d|_inf
  double interior_fraction = 0;  // sum of distances to {0, +-1} over K*m
};

// Distance of each cell to the nearest of {0, 1} (or {0, +-1}), averaged.
double interior_mass_fraction(const Matrix& u);

struct RebalanceResult {
  LpStatus status = LpStatus::kInfeasible;
  ControlTrajectory control;
  Matrix states;      // n x (K + 1), empty unless optimal
  double mass_gap = 0;  // 1'nominal - 1'x0
  int lp_iterations = 0;
  double lp_seconds = 0;
  LpSolution lp;
};

RebalanceResult solve_relaxed_rebalance(const RebalanceInstance& instance,
                                        const ReachabilityDiscretization& disc,
                                        const LpOptions& options = {});
RebalanceResult solve_relaxed_rebalance(const RebalanceInstance& instance,
                                        const TimeGrid& grid,
                                        const LpOptions& options = {});

// Snaps cells within tol of {0, 1} ({0, +-1} in signed mode). Cells that
// stay fractional are kept. Throws kNonBinary above 1e-3 interior mass and
// kTerminalDrift above 1e-4 * |nominal|_inf.
ControlTrajectory extract_sparse_control(const ControlTrajectory& traj,
                                         const RebalanceInstance& instance,
                                         const ReachabilityDiscretization& disc,
                                         double tol = 1e-6);

struct AssumptionFlag {
  int trial = 0;
  std::string kind;  // "eta0", "eta1" or "pair"
  int i = 0;
  int j = -1;
  int run = 0;       // consecutive knots inside the tolerance band
};

struct AssumptionReport {
  int trials = 0;
  std::vector<double> min_gap_eta;   // per trial, min |h_j - eta|
  std::vector<double> min_gap_pair;  // per trial, min |h_i - h_j|
  std::vector<AssumptionFlag> flags;
  int longest_run = 0;

  bool pass() const { return flags.empty(); }
};

// Sampling check of the non-degeneracy assumption: h_j(t) = rho' Phi(T,t) b_j(t)
// at the grid knots for random unit rho.
AssumptionReport check_assumption(const LtvSystem& system, const TimeGrid& grid,
                                  int trials = 64, std::uint64_t seed = 1,
                                  double tol = 1e-9, int dwell = 3);
AssumptionReport check_assumption(const LtvSystem& system, const TimeGrid& grid,
                                  const std::vector<Vector>& rhos,
                                  double tol = 1e-9, int dwell = 3);

struct BaselineResult {
  ControlTrajectory control;  // clipped to the box
  double residual_unclipped = 0;
  double support_fraction = 0;  // of the unclipped solution, |u| > 1e-9
  int clipped_cells = 0;
};

// Minimum-norm solution of the terminal equality, then clipped to the box.
// Throws kRankDeficient (value = rank) if the reachability rows are dependent.
BaselineResult min_energy_baseline(const RebalanceInstance& instance,
                                   const ReachabilityDiscretization& disc);

}  // namespace sparsectl

#endif  // SPARSECTL_REBALANCE_HPP_
