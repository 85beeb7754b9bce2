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

#include "sparsectl/rebalance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>

#include "sparsectl/error.hpp"

namespace sparsectl {

void RebalanceInstance::validate() const {
  require(system.state_dim >= 1 && system.input_dim >= 1,
          ErrorKind::kInvalidArgument, "system has no states or inputs");
  require(x0.size() == system.state_dim, ErrorKind::kDimensionMismatch,
          "x0 has wrong dimension");
  require(target.c.cols() == system.state_dim && target.c.rows() == target.d.size(),
          ErrorKind::kDimensionMismatch, "terminal rows do not match the state");
  require(target.nominal.size() == 0 || target.nominal.size() == system.state_dim,
          ErrorKind::kDimensionMismatch, "nominal target has wrong dimension");
  require(beta >= 1, ErrorKind::kInvalidArgument, "beta must be >= 1");
  require(x0.allFinite() && target.c.allFinite() && target.d.allFinite(),
          ErrorKind::kInvalidArgument, "instance data must be finite");
}

RebalanceInstance make_rebalance_instance(const MobilityModel& model,
                                          BoundsMode bounds) {
  RebalanceInstance inst;
  inst.system = model.system;
  inst.x0 = model.scenario.initial_state();
  inst.target = terminal_constraint(model.scenario, model.index);
  inst.beta = model.scenario.beta;
  inst.bounds = bounds;
  return inst;
}

Vector ReachabilityDiscretization::terminal_state(const Vector& x0,
                                                  const Matrix& u) const {
  require(u.rows() == static_cast<Eigen::Index>(blocks.size()),
          ErrorKind::kDimensionMismatch, "control has wrong number of steps");
  Vector x = phi_total * x0;
  for (std::size_t k = 0; k < blocks.size(); ++k) {
    x += blocks[k] * u.row(static_cast<Eigen::Index>(k)).transpose();
  }
  return x;
}

ReachabilityDiscretization discretize_reachability(const LtvSystem& system,
                                                   const TimeGrid& grid) {
  require(std::abs(grid.horizon() - system.horizon) <= 1e-12 * system.horizon,
          ErrorKind::kInvalidArgument, "grid horizon differs from the system's");
  ReachabilityDiscretization d{grid, Matrix(), {}, zero_order_hold_maps(system, grid)};
  const int K = grid.steps();
  d.blocks.resize(K);
  Matrix tail = Matrix::Identity(system.state_dim, system.state_dim);
  for (int k = K - 1; k >= 0; --k) {
    d.blocks[k] = tail * d.maps[k].input_map;
    tail = tail * d.maps[k].state_map;
  }
  d.phi_total = std::move(tail);
  return d;
}

CostCensus cost_census(const Matrix& u, const TimeGrid& grid, double zero_tol) {
  require(u.rows() == grid.steps(), ErrorKind::kDimensionMismatch,
          "control does not match grid");
  const double dt = grid.dt();
  CostCensus c;
  c.l0_channel = Vector::Zero(u.cols());
  for (Eigen::Index k = 0; k < u.rows(); ++k) {
    int active = 0;
    double l1 = 0.0;
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
      const double a = std::abs(u(k, j));
      l1 += a;
      if (a > zero_tol) {
        ++active;
        c.l0_channel[j] += dt;
      }
    }
    c.l0_step_max = std::max(c.l0_step_max, active);
    c.l1_step_max = std::max(c.l1_step_max, l1);
    c.l1 += dt * l1;
  }
  c.l0 = c.l0_channel.sum();
  return c;
}

double interior_mass_fraction(const Matrix& u) {
  if (u.size() == 0) return 0.0;
  double mass = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u.data()[i]);
    mass += std::min(a, std::abs(1.0 - a));
  }
  return mass / static_cast<double>(u.size());
}

namespace {

double terminal_residual(const RebalanceInstance& inst,
                         const ReachabilityDiscretization& disc, const Matrix& u) {
  const Vector xt = disc.terminal_state(inst.x0, u);
  const Vector r = inst.target.c * xt - inst.target.d;
  return r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
}

ControlTrajectory make_trajectory(const RebalanceInstance& inst,
                                  const ReachabilityDiscretization& disc, Matrix u) {
  ControlTrajectory t{disc.grid, std::move(u), {}, 0.0, 0.0};
  t.census = cost_census(t.u, disc.grid);
  t.terminal_residual = terminal_residual(inst, disc, t.u);
  t.interior_fraction = interior_mass_fraction(t.u);
  return t;
}

}  // namespace

RebalanceResult solve_relaxed_rebalance(const RebalanceInstance& inst,
                                        const ReachabilityDiscretization& disc,
                                        const LpOptions& options) {
  inst.validate();
  const int K = disc.grid.steps();
  const int m = inst.system.input_dim;
  require(static_cast<int>(disc.blocks.size()) == K &&
              disc.phi_total.rows() == inst.system.state_dim,
          ErrorKind::kDimensionMismatch, "discretization does not match instance");
  const bool signed_mode = inst.bounds == BoundsMode::kSigned;
  const int cells = K * m;
  const int nv = signed_mode ? 2 * cells : cells;
  const double dt = disc.grid.dt();
  const int rows = static_cast<int>(inst.target.c.rows());

  LinearProgram lp(nv);
  lp.c.setConstant(dt);
  lp.upper.setOnes();
  lp.a_eq = Matrix::Zero(rows, nv);
  lp.b_eq = inst.target.d - inst.target.c * (disc.phi_total * inst.x0);
  for (int k = 0; k < K; ++k) {
    const Matrix cg = inst.target.c * disc.blocks[k];
    lp.a_eq.middleCols(k * m, m) = cg;
    if (signed_mode) lp.a_eq.middleCols(cells + k * m, m) = -cg;
  }
  // Per-step l1 rows are redundant when beta >= m (box bounds imply them).
  if (inst.beta < m) {
    lp.a_in = Matrix::Zero(K, nv);
    lp.b_in = Vector::Constant(K, inst.beta);
    for (int k = 0; k < K; ++k) {
      lp.a_in.block(k, k * m, 1, m).setOnes();
      if (signed_mode) lp.a_in.block(k, cells + k * m, 1, m).setOnes();
    }
  }

  RebalanceResult res;
  res.control = ControlTrajectory{disc.grid, Matrix::Zero(K, m), {}, 0.0, 0.0};
  if (inst.target.nominal.size() == inst.x0.size()) {
    res.mass_gap = inst.target.nominal.sum() - inst.x0.sum();
  }
  const auto t0 = std::chrono::steady_clock::now();
  res.lp = solve_lp(lp, options);
  res.lp_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  res.status = res.lp.status;
  res.lp_iterations = res.lp.iterations;
  if (!res.lp.optimal()) return res;

  Matrix u(K, m);
  for (int k = 0; k < K; ++k) {
    for (int p = 0; p < m; ++p) {
      u(k, p) = res.lp.z[k * m + p];
      if (signed_mode) u(k, p) -= res.lp.z[cells + k * m + p];
    }
  }
  res.control = make_trajectory(inst, disc, std::move(u));
  res.states = propagate_state(disc.maps, inst.x0, res.control.u);
  return res;
}

RebalanceResult solve_relaxed_rebalance(const RebalanceInstance& instance,
                                        const TimeGrid& grid,
                                        const LpOptions& options) {
  return solve_relaxed_rebalance(instance, discretize_reachability(instance.system, grid),
                                 options);
}

ControlTrajectory extract_sparse_control(const ControlTrajectory& traj,
                                         const RebalanceInstance& inst,
                                         const ReachabilityDiscretization& disc,
                                         double tol) {
  Matrix u = traj.u;
  const bool signed_mode = inst.bounds == BoundsMode::kSigned;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double& x = u.data()[i];
    if (std::abs(x) <= tol) x = 0.0;
    else if (std::abs(x - 1.0) <= tol) x = 1.0;
    else if (signed_mode && std::abs(x + 1.0) <= tol) x = -1.0;
  }
  ControlTrajectory out = make_trajectory(inst, disc, std::move(u));
  if (out.interior_fraction > 1e-3) {
    fail(ErrorKind::kNonBinary,
         "control is not bang-bang: interior mass fraction " +
             std::to_string(out.interior_fraction),
         out.interior_fraction);
  }
  double scale = 1.0;
  if (inst.target.nominal.size()) scale = inst.target.nominal.cwiseAbs().maxCoeff();
  else if (inst.target.d.size()) scale = inst.target.d.cwiseAbs().maxCoeff();
  if (scale == 0.0) scale = 1.0;
  if (out.terminal_residual > 1e-4 * scale) {
    fail(ErrorKind::kTerminalDrift,
         "snapped control misses the target by " + std::to_string(out.terminal_residual),
         out.terminal_residual);
  }
  return out;
}

namespace {

// Longest run of consecutive knots with |values| <= tol.
int longest_run(const Vector& values, double tol) {
  int best = 0;
  int run = 0;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    run = std::abs(values[k]) <= tol ? run + 1 : 0;
    best = std::max(best, run);
  }
  return best;
}

}  // namespace

AssumptionReport check_assumption(const LtvSystem& system, const TimeGrid& grid,
                                  const std::vector<Vector>& rhos, double tol,
                                  int dwell) {
  const int K = grid.steps();
  const int n = system.state_dim;
  const int m = system.input_dim;
  const std::vector<StepMap> maps = zero_order_hold_maps(system, grid);
  std::vector<Matrix> b_at(K + 1);
  if (system.time_invariant) {
    b_at.assign(K + 1, system.at(0.0).b);
  } else {
    for (int k = 0; k <= K; ++k) b_at[k] = system.at(grid.knot(k)).b;
  }

  AssumptionReport rep;
  rep.trials = static_cast<int>(rhos.size());
  for (int trial = 0; trial < rep.trials; ++trial) {
    require(rhos[trial].size() == n, ErrorKind::kDimensionMismatch,
            "rho has wrong dimension");
    // h(k, j) = rho' Phi(T, t_k) b_j(t_k), by the backward recursion
    // r_k = Ad_k' r_{k+1}.
    Matrix h(K + 1, m);
    Vector r = rhos[trial];
    for (int k = K; k >= 0; --k) {
      h.row(k) = (b_at[k].transpose() * r).transpose();
      if (k > 0) r = maps[k - 1].state_map.transpose() * r;
    }
    double gap_eta = kInf;
    double gap_pair = kInf;
    for (int j = 0; j < m; ++j) {
      for (int eta = 0; eta <= 1; ++eta) {
        const Vector diff = h.col(j).array() - static_cast<double>(eta);
        gap_eta = std::min(gap_eta, diff.cwiseAbs().minCoeff());
        const int run = longest_run(diff, tol);
        rep.longest_run = std::max(rep.longest_run, run);
        if (run >= dwell) {
          rep.flags.push_back({trial, eta == 0 ? "eta0" : "eta1", j, -1, run});
        }
      }
    }
    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        const Vector diff = h.col(i) - h.col(j);
        gap_pair = std::min(gap_pair, diff.cwiseAbs().minCoeff());
        const int run = longest_run(diff, tol);
        rep.longest_run = std::max(rep.longest_run, run);
        if (run >= dwell) rep.flags.push_back({trial, "pair", i, j, run});
      }
    }
    rep.min_gap_eta.push_back(gap_eta);
    rep.min_gap_pair.push_back(gap_pair);
  }
  return rep;
}

AssumptionReport check_assumption(const LtvSystem& system, const TimeGrid& grid,
                                  int trials, std::uint64_t seed, double tol,
                                  int dwell) {
  require(trials >= 1, ErrorKind::kInvalidArgument, "need at least one trial");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::vector<Vector> rhos;
  for (int t = 0; t < trials; ++t) {
    Vector rho(system.state_dim);
    for (Eigen::Index i = 0; i < rho.size(); ++i) rho[i] = normal(rng);
    rhos.push_back(rho.normalized());
  }
  return check_assumption(system, grid, rhos, tol, dwell);
}

BaselineResult min_energy_baseline(const RebalanceInstance& inst,
                                   const ReachabilityDiscretization& disc) {
  inst.validate();
  const int K = disc.grid.steps();
  const int m = inst.system.input_dim;
  const Eigen::Index rows = inst.target.c.rows();
  Matrix g(rows, K * m);
  for (int k = 0; k < K; ++k) g.middleCols(k * m, m) = inst.target.c * disc.blocks[k];
  const Vector r = inst.target.d - inst.target.c * (disc.phi_total * inst.x0);

  const Matrix gram = g * g.transpose();
  Eigen::FullPivLU<Matrix> lu(gram);
  lu.setThreshold(1e-12);
  if (lu.rank() < rows) {
    fail(ErrorKind::kRankDeficient,
         "reachability map has rank " + std::to_string(lu.rank()) + " < " +
             std::to_string(rows),
         static_cast<double>(lu.rank()));
  }
  const Vector flat = g.transpose() * lu.solve(r);
  Matrix u(K, m);
  for (int k = 0; k < K; ++k) u.row(k) = flat.segment(k * m, m).transpose();

  BaselineResult out;
  out.residual_unclipped = terminal_residual(inst, disc, u);
  Eigen::Index support = 0;
  const double lo = inst.bounds == BoundsMode::kSigned ? -1.0 : 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    double& x = u.data()[i];
    if (std::abs(x) > 1e-9) ++support;
    const double c = std::clamp(x, lo, 1.0);
    if (c != x) ++out.clipped_cells;
    x = c;
  }
  out.support_fraction = static_cast<double>(support) / static_cast<double>(u.size());
  out.control = make_trajectory(inst, disc, std::move(u));
  return out;
}

}  // namespace sparsectl
