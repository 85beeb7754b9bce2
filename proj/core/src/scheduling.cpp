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

#include "sparsectl/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparsectl/error.hpp"

namespace sparsectl {

void ScheduleInstance::validate() const {
  system.validate();
  const int m = channels();
  require(alpha.size() == m, ErrorKind::kDimensionMismatch,
          "alpha must have one entry per input channel");
  for (int j = 0; j < m; ++j) {
    require(alpha[j] > 0.0 && alpha[j] <= system.horizon + 1e-12,
            ErrorKind::kInvalidArgument, "alpha_j must lie in (0, T]");
  }
  require(beta >= 1 && beta <= m, ErrorKind::kInvalidArgument,
          "beta must lie in 1..m");
}

ScoreTable controllability_scores(const LtiSystem& system, const TimeGrid& grid) {
  system.validate();
  const int m = system.input_dim();
  ScoreTable out{grid, Matrix(grid.steps(), m)};
  for (int k = 0; k < grid.steps(); ++k) {
    const Matrix eb = matrix_exponential(system.a, grid.midpoint(k)) * system.b;
    out.scores.row(k) = eb.colwise().squaredNorm();
  }
  return out;
}

ScoreTable controllability_scores(const ScheduleInstance& instance,
                                  const TimeGrid& grid) {
  instance.validate();
  return controllability_scores(instance.system, grid);
}

double objective_value(const Matrix& v, const ScoreTable& scores) {
  require(v.rows() == scores.scores.rows() && v.cols() == scores.scores.cols(),
          ErrorKind::kDimensionMismatch, "schedule and score grids differ");
  return scores.grid.dt() * v.cwiseProduct(scores.scores).sum();
}

RegularityReport check_regularity(const ScoreTable& scores, double tol) {
  RegularityReport r;
  const Matrix& f = scores.scores;
  const auto range = [](const Vector& x) { return x.maxCoeff() - x.minCoeff(); };
  for (int j = 0; j < f.cols(); ++j) {
    if (range(f.col(j)) < tol) r.constant_channels.push_back(j);
  }
  for (int i = 0; i < f.cols(); ++i) {
    for (int j = i + 1; j < f.cols(); ++j) {
      if (range(f.col(i) - f.col(j)) < tol) r.constant_pairs.emplace_back(i, j);
    }
  }
  return r;
}

double discreteness_fraction(const Matrix& v, double tol) {
  if (v.size() == 0) return 0.0;
  Eigen::Index interior = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double x = v.data()[i];
    if (std::abs(x) > tol && std::abs(x - 1.0) > tol) ++interior;
  }
  return static_cast<double>(interior) / static_cast<double>(v.size());
}

namespace {

Schedule make_schedule(const ScoreTable& scores, Matrix v) {
  Schedule s{scores.grid, std::move(v), 0.0, Vector(), 0.0};
  s.objective = objective_value(s.v, scores);
  s.usage = scores.grid.dt() * s.v.colwise().sum().transpose();
  s.discreteness = discreteness_fraction(s.v);
  return s;
}

void check_budgets(const ScoreTable& scores, const Vector& alpha, int beta) {
  const Eigen::Index m = scores.scores.cols();
  require(m >= 1, ErrorKind::kInvalidArgument, "no input channels");
  require(alpha.size() == m, ErrorKind::kDimensionMismatch,
          "alpha must have one entry per channel");
  require(beta >= 1 && beta <= m, ErrorKind::kInvalidArgument,
          "beta must lie in 1..m");
  require(scores.scores.allFinite() && alpha.allFinite(),
          ErrorKind::kInvalidArgument, "scores and budgets must be finite");
}

// Budget alpha_j expressed in whole grid cells.
int budget_cells(double alpha, double dt) {
  return static_cast<int>(std::floor(alpha / dt + 1e-9));
}

// Top-beta rule with ties to the lowest channel index.
Matrix select_top(const Matrix& f, const Vector& gamma, int beta) {
  const Eigen::Index K = f.rows();
  const Eigen::Index m = f.cols();
  Matrix v = Matrix::Zero(K, m);
  std::vector<int> order(m);
  for (Eigen::Index k = 0; k < K; ++k) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return f(k, a) + gamma[a] > f(k, b) + gamma[b];
    });
    int taken = 0;
    for (int j : order) {
      if (taken == beta || f(k, j) + gamma[j] <= 0.0) break;
      v(k, j) = 1.0;
      ++taken;
    }
  }
  return v;
}

}  // namespace

Schedule solve_relaxed_schedule(const ScoreTable& scores, const Vector& alpha,
                                int beta, const LpOptions& options) {
  check_budgets(scores, alpha, beta);
  const int K = scores.grid.steps();
  const int m = static_cast<int>(scores.scores.cols());
  const double dt = scores.grid.dt();
  const bool cap_rows = beta < m;

  // Variable k*m + j is v(k, j).
  LinearProgram lp(K * m);
  lp.upper.setOnes();
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < m; ++j) lp.c[k * m + j] = -dt * scores.scores(k, j);
  }
  const int rows = m + (cap_rows ? K : 0);
  lp.a_in = Matrix::Zero(rows, K * m);
  lp.b_in = Vector::Zero(rows);
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < K; ++k) lp.a_in(j, k * m + j) = dt;
    lp.b_in[j] = alpha[j];
  }
  if (cap_rows) {
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < m; ++j) lp.a_in(m + k, k * m + j) = 1.0;
      lp.b_in[m + k] = beta;
    }
  }
  const LpSolution sol = solve_lp(lp, options);
  if (sol.status == LpStatus::kInfeasible || sol.status == LpStatus::kUnbounded) {
    fail(ErrorKind::kInternal,
         std::string("schedule LP reported ") + to_string(sol.status));
  }
  if (!sol.optimal()) {
    fail(ErrorKind::kNoConvergence, "schedule LP hit the iteration limit");
  }
  Matrix v(K, m);
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < m; ++j) v(k, j) = sol.z[k * m + j];
  }
  return make_schedule(scores, std::move(v));
}

Schedule solve_relaxed_schedule(const ScheduleInstance& instance,
                                const TimeGrid& grid, const LpOptions& options) {
  const ScoreTable scores = controllability_scores(instance, grid);
  return solve_relaxed_schedule(scores, instance.alpha, instance.beta, options);
}

Schedule recover_binary_schedule(const Schedule& schedule,
                                 const ScoreTable& scores, double tol) {
  Matrix v = schedule.v;
  Eigen::Index interior = 0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double& x = v.data()[i];
    if (std::abs(x) <= tol) x = 0.0;
    else if (std::abs(x - 1.0) <= tol) x = 1.0;
    else ++interior;
  }
  const double fraction =
      v.size() ? static_cast<double>(interior) / static_cast<double>(v.size()) : 0.0;
  if (fraction > 1e-4) {
    fail(ErrorKind::kNonBinary,
         "relaxed schedule is not binary: fractional cell share " +
             std::to_string(fraction),
         fraction);
  }
  return make_schedule(scores, std::move(v));
}

std::pair<Schedule, DualReport> solve_schedule_dual(const ScoreTable& scores,
                                                    const Vector& alpha, int beta,
                                                    int max_sweeps) {
  check_budgets(scores, alpha, beta);
  const Matrix& f = scores.scores;
  const int K = static_cast<int>(f.rows());
  const int m = static_cast<int>(f.cols());
  const double dt = scores.grid.dt();
  std::vector<int> cells(m);
  for (int j = 0; j < m; ++j) cells[j] = budget_cells(alpha[j], dt);

  Vector gamma = Vector::Zero(m);
  std::vector<double> threshold(K);
  std::vector<double> others;
  double best_residual = kInf;

  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    // Best response of each channel with the others frozen: channel j wins
    // cell k iff gamma_j exceeds threshold[k].
    for (int j = 0; j < m; ++j) {
      for (int k = 0; k < K; ++k) {
        others.clear();
        for (int i = 0; i < m; ++i) {
          if (i != j && f(k, i) + gamma[i] > 0.0) others.push_back(f(k, i) + gamma[i]);
        }
        double bar = 0.0;
        if (static_cast<int>(others.size()) >= beta) {
          std::nth_element(others.begin(), others.begin() + (beta - 1), others.end(),
                           std::greater<>());
          bar = std::max(0.0, others[beta - 1]);
        }
        threshold[k] = bar - f(k, j);
      }
      std::sort(threshold.begin(), threshold.end());
      const int c = cells[j];
      if (c >= K || threshold[c] >= 0.0) {
        gamma[j] = 0.0;
      } else if (c == 0) {
        gamma[j] = threshold[0] - 1.0;
      } else {
        gamma[j] = 0.5 * (threshold[c - 1] + threshold[c]);
      }
    }

    const Matrix v = select_top(f, gamma, beta);
    bool done = true;
    double residual = 0.0;
    for (int j = 0; j < m; ++j) {
      const double count = v.col(j).sum();
      const double y = dt * count;
      // Budgets are hard; a binding channel may fall one cell short.
      if (count > cells[j] || (gamma[j] < 0.0 && count < cells[j] - 1)) {
        done = false;
        residual = std::max(residual, std::abs(y - alpha[j]));
      }
    }
    best_residual = std::min(best_residual, residual);
    if (done) {
      DualReport report;
      report.gamma = gamma;
      report.sweeps = sweep;
      for (int j = 0; j < m; ++j) {
        report.slackness_residual =
            std::max(report.slackness_residual,
                     std::abs(gamma[j] * (dt * v.col(j).sum() - alpha[j])));
      }
      return {make_schedule(scores, v), report};
    }
  }
  fail(ErrorKind::kNoConvergence,
       "multiplier search did not settle; best budget residual " +
           std::to_string(best_residual),
       best_residual);
}

std::pair<Schedule, DualReport> solve_schedule_dual(const ScheduleInstance& instance,
                                                    const TimeGrid& grid,
                                                    int max_sweeps) {
  const ScoreTable scores = controllability_scores(instance, grid);
  return solve_schedule_dual(scores, instance.alpha, instance.beta, max_sweeps);
}

Schedule top_slice_schedule(const ScoreTable& scores, double alpha_total) {
  const Matrix& f = scores.scores;
  const Eigen::Index K = f.rows();
  const Eigen::Index m = f.cols();
  require(m >= 1 && K >= 1, ErrorKind::kInvalidArgument, "empty score table");
  require(std::isfinite(alpha_total) && alpha_total >= 0.0,
          ErrorKind::kInvalidArgument, "alpha_total must be nonnegative");
  const Eigen::Index total = K * m;
  const Eigen::Index want = std::min<Eigen::Index>(
      total, static_cast<Eigen::Index>(std::floor(alpha_total / scores.grid.dt() + 1e-9)));
  Matrix v = Matrix::Zero(K, m);
  if (want > 0) {
    // The threshold c is the want-th largest score.
    std::vector<double> flat(f.data(), f.data() + total);
    std::nth_element(flat.begin(), flat.begin() + (want - 1), flat.end(),
                     std::greater<>());
    const double c = flat[want - 1];
    Eigen::Index taken = 0;
    for (Eigen::Index k = 0; k < K; ++k) {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (f(k, j) > c) {
          v(k, j) = 1.0;
          ++taken;
        }
      }
    }
    for (Eigen::Index k = 0; k < K && taken < want; ++k) {
      for (Eigen::Index j = 0; j < m && taken < want; ++j) {
        if (f(k, j) == c) {
          v(k, j) = 1.0;
          ++taken;
        }
      }
    }
  }
  return make_schedule(scores, std::move(v));
}

Schedule top_slice_schedule(const LtiSystem& system, double alpha_total,
                            const TimeGrid& grid) {
  return top_slice_schedule(controllability_scores(system, grid), alpha_total);
}

}  // namespace sparsectl
