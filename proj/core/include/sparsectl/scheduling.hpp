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

#ifndef SPARSECTL_SCHEDULING_HPP_
#define SPARSECTL_SCHEDULING_HPP_

#include <utility>
#include <vector>

#include "sparsectl/lp.hpp"
#include "sparsectl/numerics.hpp"

namespace sparsectl {

// Node-scheduling data: pick at most `beta` of the m input channels at each
// time, channel j active for at most alpha[j] time units in total.
struct ScheduleInstance {
  LtiSystem system;
  Vector alpha;
  int beta = 1;

  int channels() const { return system.input_dim(); }
  // beta == m is accepted and means the per-time cap is absent.
  void validate() const;
};

// scores(k, j) = |e^{A t} b_j|^2 at t = midpoint(k).
struct ScoreTable {
  TimeGrid grid;
  Matrix scores;
};

struct Schedule {
  TimeGrid grid;
  Matrix v;              // K x m, entries in [0, 1]
  double objective = 0;  // dt * sum(scores .* v)
  Vector usage;          // dt * column sums of v
  // Cells farther than 1e-6 from {0, 1}, as a fraction of the K*m cells.
  double discreteness = 0;
};

struct DualReport {
  Vector gamma;  // <= 0
  int eta = 1;
  double slackness_residual = 0;  // max_j |gamma_j (y_j - alpha_j)|
  int sweeps = 0;
};

struct RegularityReport {
  std::vector<int> constant_channels;
  std::vector<std::pair<int, int>> constant_pairs;  // i < j

  bool pass() const { return constant_channels.empty() && constant_pairs.empty(); }
};

ScoreTable controllability_scores(const ScheduleInstance& instance,
                                  const TimeGrid& grid);
ScoreTable controllability_scores(const LtiSystem& system, const TimeGrid& grid);

double objective_value(const Matrix& v, const ScoreTable& scores);

// Flags a channel (or channel difference) whose range over the grid is < tol.
RegularityReport check_regularity(const ScoreTable& scores, double tol = 1e-9);

// Fraction of cells farther than tol from {0, 1}.
double discreteness_fraction(const Matrix& v, double tol = 1e-6);

// LP relaxation: maximize dt*sum(f.v) s.t. dt*sum_k v_kj <= alpha_j,
// sum_j v_kj <= beta, 0 <= v <= 1.
Schedule solve_relaxed_schedule(const ScheduleInstance& instance,
                                const TimeGrid& grid,
                                const LpOptions& options = {});
Schedule solve_relaxed_schedule(const ScoreTable& scores, const Vector& alpha,
                                int beta, const LpOptions& options = {});

// Snaps entries within tol of 0/1. Throws kNonBinary (value = fraction) when
// more than 1e-4 of the cells stay fractional.
Schedule recover_binary_schedule(const Schedule& schedule,
                                 const ScoreTable& scores, double tol = 1e-6);

// Multiplier search: v_j(t) = 1 for the top-beta channels with
// f_j(t) + gamma_j > 0. Throws kNoConvergence after `max_sweeps`.
std::pair<Schedule, DualReport> solve_schedule_dual(
    const ScheduleInstance& instance, const TimeGrid& grid, int max_sweeps = 500);
std::pair<Schedule, DualReport> solve_schedule_dual(const ScoreTable& scores,
                                                    const Vector& alpha, int beta,
                                                    int max_sweeps = 500);

// Aggregate-budget schedule: the alpha_total / dt largest cells are switched
// on, ties going to the lower (k, j) index.
Schedule top_slice_schedule(const LtiSystem& system, double alpha_total,
                            const TimeGrid& grid);
Schedule top_slice_schedule(const ScoreTable& scores, double alpha_total);

}  // namespace sparsectl

#endif  // SPARSECTL_SCHEDULING_HPP_
