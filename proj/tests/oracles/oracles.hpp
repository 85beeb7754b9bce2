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

#ifndef SPARSECTL_TESTS_ORACLES_HPP_
#define SPARSECTL_TESTS_ORACLES_HPP_

#include <functional>
#include <optional>

#include "sparsectl/lp.hpp"
#include "sparsectl/numerics.hpp"
#include "sparsectl/scheduling.hpp"

namespace oracle {

using sparsectl::LinearProgram;
using sparsectl::Matrix;
using sparsectl::Vector;

// Scaled Taylor series in long double, squared back up.
Matrix expm_taylor(const Matrix& a, double t, int terms = 30);

// Best objective over every basic point of a small LP with a finite box.
// Empty when no basic point is feasible.
std::optional<double> lp_vertex_optimum(const LinearProgram& lp, double tol = 1e-9);

// Every binary K x m schedule with per-channel counts <= floor(alpha_j/dt)
// and row sums <= beta; returns the best dt * sum(f.v).
double schedule_brute_force(const Matrix& scores, double dt, const Vector& alpha, int beta);

// Best dt * sum(f.v) over binary schedules with exactly `count` ones.
double top_slice_brute_force(const Matrix& scores, double dt, int count);

// For decreasing f on [0, T]: the level c with |{t : f(t) > c}| = alpha,
// found by nested bisection.
double level_for_measure(const std::function<double(double)>& f, double horizon,
                         double alpha);

// Composite trapezoid of sum_j f_j(t) v_j(t) with the schedule held constant
// on each cell, f_j(t) = |e^{At} b_j|^2 from the Taylor oracle.
double schedule_quadrature(const Matrix& a, const Matrix& b, const Matrix& v,
                           double horizon, int sub_per_cell);

}  // namespace oracle

#endif  // SPARSECTL_TESTS_ORACLES_HPP_
