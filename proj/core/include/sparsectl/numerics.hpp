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

#ifndef SPARSECTL_NUMERICS_HPP_
#define SPARSECTL_NUMERICS_HPP_

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace sparsectl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Uniform partition 0 = t_0 < ... < t_K = T.
class TimeGrid {
 public:
  TimeGrid() : TimeGrid(1.0, 1) {}
  TimeGrid(double horizon, int steps);

  int steps() const { return steps_; }
  double horizon() const { return horizon_; }
  double dt() const { return dt_; }
  double knot(int k) const { return k == steps_ ? horizon_ : k * dt_; }
  double midpoint(int k) const { return (k + 0.5) * dt_; }

  bool operator==(const TimeGrid& other) const {
    return steps_ == other.steps_ && horizon_ == other.horizon_;
  }

 private:
  double horizon_;
  int steps_;
  double dt_;
};

struct LtiSystem {
  Matrix a;
  Matrix b;
  double horizon = 1.0;

  int state_dim() const { return static_cast<int>(a.rows()); }
  int input_dim() const { return static_cast<int>(b.cols()); }
  void validate() const;
};

struct SystemMatrices {
  Matrix a;
  Matrix b;
};

// dx/dt = A(t) x + B(t) u on [0, horizon]. The provider must return matrices
// of fixed shape (state_dim x state_dim, state_dim x input_dim).
struct LtvSystem {
  int state_dim = 0;
  int input_dim = 0;
  double horizon = 1.0;
  std::function<SystemMatrices(double)> provider;
  // Lets discretization evaluate the provider once instead of per step.
  bool time_invariant = false;

  SystemMatrices at(double t) const;

  static LtvSystem from_lti(const LtiSystem& sys);
};

// e^{a t}. Scaling and squaring with a Pade approximant.
Matrix matrix_exponential(const Matrix& a, double t);

// Phi(t1, t0) for dPhi/dt = A(t) Phi, Phi(t0, t0) = I, integrated by RK4
// with substeps of at most `step / 4`. `step` defaults to horizon / 400.
Matrix transition_matrix(const LtvSystem& sys, double t1, double t0,
                         double step = 0.0);

// Zero-order-hold maps of one grid interval, with A and B frozen at the
// interval midpoint: x_{k+1} = state_map * x_k + input_map * u_k.
struct StepMap {
  Matrix state_map;
  Matrix input_map;
};

std::vector<StepMap> zero_order_hold_maps(const LtvSystem& sys,
                                          const TimeGrid& grid);

// Forward simulation with piecewise-constant input rows u(k, :), k < K.
// Returns K + 1 states as columns.
Matrix propagate_state(const LtvSystem& sys, const Vector& x0,
                       const Matrix& u, const TimeGrid& grid);
Matrix propagate_state(const std::vector<StepMap>& maps, const Vector& x0,
                       const Matrix& u);

bool all_finite(const Matrix& m);

}  // namespace sparsectl

#endif  // SPARSECTL_NUMERICS_HPP_
