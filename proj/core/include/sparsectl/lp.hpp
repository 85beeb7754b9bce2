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

#ifndef SPARSECTL_LP_HPP_
#define SPARSECTL_LP_HPP_

#include <iosfwd>
#include <limits>
#include <string>

#include "sparsectl/numerics.hpp"

namespace sparsectl {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// minimize c'z  s.t.  a_eq z = b_eq,  a_in z <= b_in,  lower <= z <= upper.
// Either constraint block may have zero rows; bounds may be infinite.
struct LinearProgram {
  Vector c;
  Matrix a_eq;
  Vector b_eq;
  Matrix a_in;
  Vector b_in;
  Vector lower;
  Vector upper;

  LinearProgram() = default;
  // Zero objective, no rows, bounds [0, +inf).
  explicit LinearProgram(int num_vars);

  int num_vars() const { return static_cast<int>(c.size()); }
  int num_eq() const { return static_cast<int>(a_eq.rows()); }
  int num_in() const { return static_cast<int>(a_in.rows()); }

  void validate() const;
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kIterationLimit };

const char* to_string(LpStatus status);

// Sign convention: c - a_eq' eq_duals - a_in' in_duals = reduced_costs,
// in_duals <= 0, reduced_costs >= 0 at a lower bound and <= 0 at an upper one.
struct LpSolution {
  LpStatus status = LpStatus::kInfeasible;
  Vector z;
  double objective = 0.0;
  Vector eq_duals;
  Vector in_duals;
  Vector reduced_costs;
  int iterations = 0;
  // Sum of infeasibilities left at the end of phase 1 (scaled units).
  double phase1_residual = 0.0;

  bool optimal() const { return status == LpStatus::kOptimal; }
};

struct LpOptions {
  double pivot_tol = 1e-9;
  double feasibility_tol = 1e-8;
  double optimality_tol = 1e-9;
  int max_iterations = 0;      // 0 means 50 * (rows + cols)
  int refactor_interval = 64;
  bool scale = true;
  // When non-empty the (unscaled) program is written here before solving.
  std::string dump_path;
};

// Dense bounded-variable revised simplex (two-phase). Returns a basic
// solution when optimal; statuses other than kOptimal are not errors.
LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options = {});

struct KktReport {
  double primal = 0.0;
  double dual = 0.0;
  double complementarity = 0.0;

  bool within(double primal_tol, double dual_tol, double comp_tol) const {
    return primal <= primal_tol && dual <= dual_tol && complementarity <= comp_tol;
  }
};

// Exact max-norm residuals of the optimality conditions for `sol`.
KktReport check_kkt(const LinearProgram& lp, const LpSolution& sol);

// Number of variables strictly inside their bounds (by more than `tol`).
int count_interior(const LinearProgram& lp, const Vector& z, double tol = 1e-9);
// Equality rows plus inequality rows holding with equality (within `tol`).
int count_active_rows(const LinearProgram& lp, const Vector& z, double tol = 1e-7);

// Fixed-column text dump for cross-checking against external solvers.
void write_lp_dump(const LinearProgram& lp, std::ostream& out);
// Honors SPARSECTL_LP_DUMP when `options.dump_path` is empty.
std::string resolve_dump_path(const LpOptions& options);

}  // namespace sparsectl

#endif  // SPARSECTL_LP_HPP_
