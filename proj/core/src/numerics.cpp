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

#include "sparsectl/numerics.hpp"

#include <cmath>
#include <string>

#include <unsupported/Eigen/MatrixFunctions>

#include "sparsectl/error.hpp"

namespace sparsectl {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "INVALID-ARGUMENT";
    case ErrorKind::kDimensionMismatch: return "DIMENSION-MISMATCH";
    case ErrorKind::kNonBinary: return "NON-BINARY";
    case ErrorKind::kTerminalDrift: return "TERMINAL-DRIFT";
    case ErrorKind::kNoConvergence: return "NO-CONVERGENCE";
    case ErrorKind::kRankDeficient: return "RANK-DEFICIENT";
    case ErrorKind::kInternal: return "INTERNAL";
    case ErrorKind::kIo: return "IO";
  }
  return "UNKNOWN";
}

TimeGrid::TimeGrid(double horizon, int steps)
    : horizon_(horizon), steps_(steps), dt_(horizon / steps) {
  require(steps >= 1, ErrorKind::kInvalidArgument, "grid needs K >= 1 steps");
  require(std::isfinite(horizon) && horizon > 0.0,
          ErrorKind::kInvalidArgument, "grid horizon must be positive");
}

bool all_finite(const Matrix& m) { return m.allFinite(); }

void LtiSystem::validate() const {
  require(a.rows() >= 1 && a.rows() == a.cols(),
          ErrorKind::kDimensionMismatch, "A must be square and non-empty");
  require(b.rows() == a.rows(), ErrorKind::kDimensionMismatch,
          "B must have as many rows as A");
  require(b.cols() >= 1, ErrorKind::kInvalidArgument,
          "B must have at least one input channel");
  require(a.allFinite() && b.allFinite(), ErrorKind::kInvalidArgument,
          "system matrices must be finite");
  require(std::isfinite(horizon) && horizon > 0.0,
          ErrorKind::kInvalidArgument, "horizon must be positive");
}

SystemMatrices LtvSystem::at(double t) const {
  require(static_cast<bool>(provider), ErrorKind::kInvalidArgument,
          "LTV system has no matrix provider");
  SystemMatrices m = provider(t);
  if (m.a.rows() != state_dim || m.a.cols() != state_dim ||
      m.b.rows() != state_dim || m.b.cols() != input_dim) {
    fail(ErrorKind::kDimensionMismatch,
         "matrix provider returned wrong shape at t=" + std::to_string(t));
  }
  require(m.a.allFinite() && m.b.allFinite(), ErrorKind::kInvalidArgument,
          "matrix provider returned non-finite entries");
  return m;
}

LtvSystem LtvSystem::from_lti(const LtiSystem& sys) {
  sys.validate();
  LtvSystem out;
  out.state_dim = sys.state_dim();
  out.input_dim = sys.input_dim();
  out.horizon = sys.horizon;
  out.time_invariant = true;
  SystemMatrices frozen{sys.a, sys.b};
  out.provider = [frozen](double) { return frozen; };
  return out;
}

Matrix matrix_exponential(const Matrix& a, double t) {
  require(a.rows() == a.cols() && a.rows() >= 1,
          ErrorKind::kDimensionMismatch, "matrix_exponential needs a square matrix");
  require(a.allFinite() && std::isfinite(t), ErrorKind::kInvalidArgument,
          "matrix_exponential needs finite input");
  Matrix scaled = a * t;
  return scaled.exp();
}

Matrix transition_matrix(const LtvSystem& sys, double t1, double t0,
                         double step) {
  require(t1 >= t0, ErrorKind::kInvalidArgument,
          "transition_matrix needs t1 >= t0");
  const int n = sys.state_dim;
  Matrix phi = Matrix::Identity(n, n);
  if (t1 == t0) return phi;
  if (step <= 0.0) step = sys.horizon / 400.0;
  const double max_sub = step / 4.0;
  const int subs = std::max(1, static_cast<int>(std::ceil((t1 - t0) / max_sub - 1e-12)));
  const double h = (t1 - t0) / subs;

  if (sys.time_invariant) {
    const Matrix a = sys.at(t0).a;
    for (int i = 0; i < subs; ++i) {
      Matrix k1 = a * phi;
      Matrix k2 = a * (phi + 0.5 * h * k1);
      Matrix k3 = a * (phi + 0.5 * h * k2);
      Matrix k4 = a * (phi + h * k3);
      phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return phi;
  }
  for (int i = 0; i < subs; ++i) {
    const double t = t0 + i * h;
    const Matrix a0 = sys.at(t).a;
    const Matrix am = sys.at(t + 0.5 * h).a;
    const Matrix a1 = sys.at(t + h).a;
    Matrix k1 = a0 * phi;
    Matrix k2 = am * (phi + 0.5 * h * k1);
    Matrix k3 = am * (phi + 0.5 * h * k2);
    Matrix k4 = a1 * (phi + h * k3);
    phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return phi;
}

namespace {

StepMap hold_map(const SystemMatrices& m, double dt) {
  const Eigen::Index n = m.a.rows();
  const Eigen::Index p = m.b.cols();
  Matrix aug = Matrix::Zero(n + p, n + p);
  aug.topLeftCorner(n, n) = m.a;
  aug.topRightCorner(n, p) = m.b;
  const Matrix e = matrix_exponential(aug, dt);
  return StepMap{e.topLeftCorner(n, n), e.topRightCorner(n, p)};
}

}  // namespace

std::vector<StepMap> zero_order_hold_maps(const LtvSystem& sys,
                                          const TimeGrid& grid) {
  std::vector<StepMap> maps;
  maps.reserve(grid.steps());
  if (sys.time_invariant) {
    const StepMap m = hold_map(sys.at(0.0), grid.dt());
    maps.assign(grid.steps(), m);
    return maps;
  }
  for (int k = 0; k < grid.steps(); ++k) {
    maps.push_back(hold_map(sys.at(grid.midpoint(k)), grid.dt()));
  }
  return maps;
}

Matrix propagate_state(const std::vector<StepMap>& maps, const Vector& x0,
                       const Matrix& u) {
  const auto steps = static_cast<Eigen::Index>(maps.size());
  require(!maps.empty(), ErrorKind::kInvalidArgument, "no step maps");
  const Eigen::Index n = maps.front().state_map.rows();
  const Eigen::Index p = maps.front().input_map.cols();
  require(x0.size() == n, ErrorKind::kDimensionMismatch,
          "initial state has wrong dimension");
  require(u.rows() == steps && u.cols() == p, ErrorKind::kDimensionMismatch,
          "control must be K x m");
  Matrix traj(n, steps + 1);
  traj.col(0) = x0;
  for (Eigen::Index k = 0; k < steps; ++k) {
    traj.col(k + 1) = maps[k].state_map * traj.col(k) +
                      maps[k].input_map * u.row(k).transpose();
  }
  return traj;
}

Matrix propagate_state(const LtvSystem& sys, const Vector& x0, const Matrix& u,
                       const TimeGrid& grid) {
  require(x0.size() == sys.state_dim, ErrorKind::kDimensionMismatch,
          "initial state has wrong dimension");
  require(u.rows() == grid.steps() && u.cols() == sys.input_dim,
          ErrorKind::kDimensionMismatch, "control must be K x m");
  return propagate_state(zero_order_hold_maps(sys, grid), x0, u);
}

}  // namespace sparsectl
