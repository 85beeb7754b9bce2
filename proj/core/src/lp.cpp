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

#include "sparsectl/lp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "sparsectl/error.hpp"

namespace sparsectl {

const char* to_string(LpStatus status) {
  switch (status) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kIterationLimit: return "iteration-limit";
  }
  return "unknown";
}

LinearProgram::LinearProgram(int num_vars)
    : c(Vector::Zero(num_vars)),
      a_eq(0, num_vars),
      b_eq(0),
      a_in(0, num_vars),
      b_in(0),
      lower(Vector::Zero(num_vars)),
      upper(Vector::Constant(num_vars, kInf)) {}

void LinearProgram::validate() const {
  const Eigen::Index n = c.size();
  require(n >= 1, ErrorKind::kInvalidArgument, "LP has no variables");
  require(a_eq.cols() == n && a_in.cols() == n, ErrorKind::kDimensionMismatch,
          "LP constraint blocks disagree on column count");
  require(b_eq.size() == a_eq.rows() && b_in.size() == a_in.rows(),
          ErrorKind::kDimensionMismatch, "LP right-hand side size mismatch");
  require(lower.size() == n && upper.size() == n,
          ErrorKind::kDimensionMismatch, "LP bound vectors have wrong size");
  require(c.allFinite() && a_eq.allFinite() && a_in.allFinite() &&
              b_eq.allFinite() && b_in.allFinite(),
          ErrorKind::kInvalidArgument, "LP data must be finite");
  for (Eigen::Index j = 0; j < n; ++j) {
    require(!std::isnan(lower[j]) && !std::isnan(upper[j]) &&
                lower[j] <= upper[j] && lower[j] < kInf && upper[j] > -kInf,
            ErrorKind::kInvalidArgument, "LP bounds must satisfy lower <= upper");
  }
}

namespace {

double pow2_scale(double max_abs) {
  if (max_abs <= 0.0 || !std::isfinite(max_abs)) return 1.0;
  return std::ldexp(1.0, -static_cast<int>(std::lround(std::log2(max_abs))));
}

enum class VarState { kBasic, kAtLower, kAtUpper, kFreeZero };

// Two-phase bounded-variable primal simplex over
//   [A | I_slack | diag(sign)] x = b,
// with columns ordered structural, slack (one per inequality row),
// artificial (one per row).
class Simplex {
 public:
  Simplex(const Matrix& a, const Vector& b, int num_eq, const Vector& cost,
          const Vector& lower, const Vector& upper, const LpOptions& opt)
      : a_(a),
        b_(b),
        rows_(static_cast<int>(a.rows())),
        nstruct_(static_cast<int>(a.cols())),
        neq_(num_eq),
        nslack_(rows_ - num_eq),
        ncols_(nstruct_ + nslack_ + rows_),
        opt_(opt) {
    lo_.resize(ncols_);
    hi_.resize(ncols_);
    x_.setZero(ncols_);
    cost2_.setZero(ncols_);
    state_.assign(ncols_, VarState::kAtLower);
    pos_.assign(ncols_, -1);
    head_.assign(rows_, -1);
    art_sign_.assign(rows_, 1.0);
    for (int j = 0; j < nstruct_; ++j) {
      lo_[j] = lower[j];
      hi_[j] = upper[j];
      cost2_[j] = cost[j];
    }
    for (int i = 0; i < nslack_; ++i) {
      lo_[nstruct_ + i] = 0.0;
      hi_[nstruct_ + i] = kInf;
    }
    for (int i = 0; i < rows_; ++i) {
      lo_[art(i)] = 0.0;
      hi_[art(i)] = kInf;
    }
    max_iter_ = opt.max_iterations > 0 ? opt.max_iterations
                                       : 50 * (rows_ + ncols_) + 1000;
  }

  LpStatus run() {
    initial_basis();
    // Phase 1: minimize the sum of artificials.
    Vector cost1 = Vector::Zero(ncols_);
    for (int i = 0; i < rows_; ++i) cost1[art(i)] = 1.0;
    LpStatus st = iterate(cost1, /*phase1=*/true);
    if (st == LpStatus::kIterationLimit) return st;
    refactor();
    phase1_residual_ = 0.0;
    for (int i = 0; i < rows_; ++i) phase1_residual_ += std::max(0.0, x_[art(i)]);
    for (int i = 0; i < rows_; ++i) {
      if (x_[art(i)] > opt_.feasibility_tol) return LpStatus::kInfeasible;
    }
    for (int i = 0; i < rows_; ++i) hi_[art(i)] = 0.0;
    drive_out_artificials();
    st = iterate(cost2_, /*phase1=*/false);
    refactor();
    return st;
  }

  const Vector& x() const { return x_; }
  int iterations() const { return iterations_; }
  double phase1_residual() const { return phase1_residual_; }
  bool at_lower(int j) const { return state_[j] == VarState::kAtLower; }
  bool at_upper(int j) const { return state_[j] == VarState::kAtUpper; }

  // Row duals for the current basis and the given cost.
  Vector duals(const Vector& cost) const {
    Vector cb(rows_);
    for (int i = 0; i < rows_; ++i) cb[i] = cost[head_[i]];
    return binv_.transpose() * cb;
  }

  const Vector& phase2_cost() const { return cost2_; }

 private:
  int art(int i) const { return nstruct_ + nslack_ + i; }
  bool is_art(int j) const { return j >= nstruct_ + nslack_; }

  // Column j of the full constraint matrix, multiplied by binv_.
  Vector ftran(int j) const {
    if (j < nstruct_) return binv_ * a_.col(j);
    if (j < nstruct_ + nslack_) return binv_.col(neq_ + (j - nstruct_));
    const int i = j - nstruct_ - nslack_;
    return art_sign_[i] * binv_.col(i);
  }

  void column(int j, Eigen::Ref<Vector> out) const {
    if (j < nstruct_) {
      out = a_.col(j);
      return;
    }
    out.setZero();
    if (j < nstruct_ + nslack_) {
      out[neq_ + (j - nstruct_)] = 1.0;
    } else {
      const int i = j - nstruct_ - nslack_;
      out[i] = art_sign_[i];
    }
  }

  void initial_basis() {
    for (int j = 0; j < nstruct_; ++j) {
      if (std::isfinite(lo_[j])) {
        state_[j] = VarState::kAtLower;
        x_[j] = lo_[j];
      } else if (std::isfinite(hi_[j])) {
        state_[j] = VarState::kAtUpper;
        x_[j] = hi_[j];
      } else {
        state_[j] = VarState::kFreeZero;
        x_[j] = 0.0;
      }
    }
    Vector resid = b_ - a_ * x_.head(nstruct_);
    for (int i = 0; i < rows_; ++i) {
      const int slack = i >= neq_ ? nstruct_ + (i - neq_) : -1;
      if (slack >= 0 && resid[i] >= 0.0) {
        set_basic(slack, i);
        x_[slack] = resid[i];
        state_[art(i)] = VarState::kAtLower;
        x_[art(i)] = 0.0;
        hi_[art(i)] = 0.0;
      } else {
        if (slack >= 0) {
          state_[slack] = VarState::kAtLower;
          x_[slack] = 0.0;
        }
        art_sign_[i] = resid[i] >= 0.0 ? 1.0 : -1.0;
        set_basic(art(i), i);
        x_[art(i)] = std::abs(resid[i]);
      }
    }
    refactor();
  }

  void set_basic(int j, int row) {
    head_[row] = j;
    pos_[j] = row;
    state_[j] = VarState::kBasic;
  }

  void refactor() {
    Matrix basis(rows_, rows_);
    for (int i = 0; i < rows_; ++i) column(head_[i], basis.col(i));
    Eigen::PartialPivLU<Matrix> lu(basis);
    binv_ = lu.inverse();
    // Recompute basic values from the nonbasic ones.
    Vector rhs = b_;
    Vector xs = x_.head(nstruct_);
    for (int i = 0; i < rows_; ++i) {
      if (head_[i] < nstruct_) xs[head_[i]] = 0.0;
    }
    rhs -= a_ * xs;
    for (int s = 0; s < nslack_; ++s) {
      const int j = nstruct_ + s;
      if (state_[j] != VarState::kBasic) rhs[neq_ + s] -= x_[j];
    }
    for (int i = 0; i < rows_; ++i) {
      const int j = art(i);
      if (state_[j] != VarState::kBasic) rhs[i] -= art_sign_[i] * x_[j];
    }
    const Vector xb = binv_ * rhs;
    for (int i = 0; i < rows_; ++i) x_[head_[i]] = xb[i];
    since_refactor_ = 0;
  }

  void pivot(int p, const Vector& w) {
    const double piv = w[p];
    binv_.row(p) /= piv;
    for (int i = 0; i < rows_; ++i) {
      if (i == p || w[i] == 0.0) continue;
      binv_.row(i) -= w[i] * binv_.row(p);
    }
  }

  // Reduced costs of every column for the given cost vector.
  void reduced_costs(const Vector& cost, Vector& d) const {
    const Vector y = duals(cost);
    d.resize(ncols_);
    d.head(nstruct_) = cost.head(nstruct_) - a_.transpose() * y;
    for (int s = 0; s < nslack_; ++s) d[nstruct_ + s] = cost[nstruct_ + s] - y[neq_ + s];
    for (int i = 0; i < rows_; ++i) d[art(i)] = cost[art(i)] - art_sign_[i] * y[i];
  }

  // Direction (+1 increase, -1 decrease) a nonbasic column would move in,
  // or 0 when it is not attractive.
  int attractive(int j, double dj) const {
    if (lo_[j] == hi_[j]) return 0;
    switch (state_[j]) {
      case VarState::kAtLower: return dj < -opt_.optimality_tol ? 1 : 0;
      case VarState::kAtUpper: return dj > opt_.optimality_tol ? -1 : 0;
      case VarState::kFreeZero:
        if (dj < -opt_.optimality_tol) return 1;
        if (dj > opt_.optimality_tol) return -1;
        return 0;
      case VarState::kBasic: return 0;
    }
    return 0;
  }

  LpStatus iterate(const Vector& cost, bool phase1) {
    Vector d;
    int degenerate_run = 0;
    const int bland_after = 10 * (rows_ + ncols_);
    const double feas = opt_.feasibility_tol;
    while (true) {
      if (iterations_ >= max_iter_) return LpStatus::kIterationLimit;
      if (since_refactor_ >= opt_.refactor_interval) refactor();
      reduced_costs(cost, d);
      const bool bland = degenerate_run > bland_after;

      int q = -1;
      int dir = 0;
      double best = 0.0;
      for (int j = 0; j < ncols_; ++j) {
        if (state_[j] == VarState::kBasic) continue;
        const int s = attractive(j, d[j]);
        if (s == 0) continue;
        if (bland) {
          q = j;
          dir = s;
          break;
        }
        if (std::abs(d[j]) > best) {
          best = std::abs(d[j]);
          q = j;
          dir = s;
        }
      }
      if (q < 0) return LpStatus::kOptimal;

      const Vector w = ftran(q);
      // Harris pass 1: largest step with bounds relaxed by `feas`.
      double theta_max = kInf;
      for (int i = 0; i < rows_; ++i) {
        const double delta = -dir * w[i];
        const int bj = head_[i];
        if (delta < -opt_.pivot_tol && std::isfinite(lo_[bj])) {
          theta_max = std::min(theta_max, (x_[bj] - lo_[bj] + feas) / -delta);
        } else if (delta > opt_.pivot_tol && std::isfinite(hi_[bj])) {
          theta_max = std::min(theta_max, (hi_[bj] - x_[bj] + feas) / delta);
        }
      }
      const double flip = hi_[q] - lo_[q];
      if (!std::isfinite(theta_max) && !std::isfinite(flip)) {
        if (phase1) fail(ErrorKind::kInternal, "phase 1 reported unbounded");
        return LpStatus::kUnbounded;
      }
      // Pass 2: among rows blocking within theta_max pick the largest pivot.
      int p = -1;
      double p_ratio = kInf;
      double p_mag = 0.0;
      for (int i = 0; i < rows_; ++i) {
        const double delta = -dir * w[i];
        const int bj = head_[i];
        double ratio;
        if (delta < -opt_.pivot_tol && std::isfinite(lo_[bj])) {
          ratio = (x_[bj] - lo_[bj]) / -delta;
        } else if (delta > opt_.pivot_tol && std::isfinite(hi_[bj])) {
          ratio = (hi_[bj] - x_[bj]) / delta;
        } else {
          continue;
        }
        if (ratio > theta_max) continue;
        const double mag = std::abs(delta);
        bool take;
        if (bland) {
          take = p < 0 || ratio < p_ratio - 1e-12 ||
                 (ratio <= p_ratio + 1e-12 && bj < head_[p]);
        } else {
          take = mag > p_mag;
        }
        if (take) {
          p = i;
          p_ratio = ratio;
          p_mag = mag;
        }
      }

      ++iterations_;
      ++since_refactor_;
      if (std::isfinite(flip) && (p < 0 || flip <= std::max(p_ratio, 0.0))) {
        // Bound flip: no basis change.
        const double step = flip;
        x_[q] = dir > 0 ? hi_[q] : lo_[q];
        state_[q] = dir > 0 ? VarState::kAtUpper : VarState::kAtLower;
        for (int i = 0; i < rows_; ++i) x_[head_[i]] -= dir * step * w[i];
        degenerate_run = 0;
        continue;
      }
      if (p < 0) fail(ErrorKind::kInternal, "simplex ratio test found no pivot row");

      const double step = std::max(p_ratio, 0.0);
      const double delta_p = -dir * w[p];
      for (int i = 0; i < rows_; ++i) x_[head_[i]] -= dir * step * w[i];
      x_[q] += dir * step;
      const int leaving = head_[p];
      if (delta_p < 0.0) {
        x_[leaving] = lo_[leaving];
        state_[leaving] = VarState::kAtLower;
      } else {
        x_[leaving] = hi_[leaving];
        state_[leaving] = VarState::kAtUpper;
      }
      pos_[leaving] = -1;
      if (is_art(leaving)) {
        hi_[leaving] = 0.0;
        x_[leaving] = 0.0;
        state_[leaving] = VarState::kAtLower;
      }
      set_basic(q, p);
      pivot(p, w);
      degenerate_run = step < 1e-12 ? degenerate_run + 1 : 0;
    }
  }

  // Replace zero-level basic artificials by structural or slack columns where
  // the row allows it; rows that stay artificial are linearly dependent.
  void drive_out_artificials() {
    for (int p = 0; p < rows_; ++p) {
      if (!is_art(head_[p])) continue;
      const Eigen::RowVectorXd rho = binv_.row(p);
      const Eigen::RowVectorXd alpha = rho * a_;
      int best = -1;
      double mag = 1e-7;
      for (int j = 0; j < nstruct_; ++j) {
        if (state_[j] == VarState::kBasic || lo_[j] == hi_[j]) continue;
        if (std::abs(alpha[j]) > mag) {
          mag = std::abs(alpha[j]);
          best = j;
        }
      }
      for (int s = 0; s < nslack_; ++s) {
        const int j = nstruct_ + s;
        if (state_[j] == VarState::kBasic) continue;
        if (std::abs(rho[neq_ + s]) > mag) {
          mag = std::abs(rho[neq_ + s]);
          best = j;
        }
      }
      if (best < 0) continue;
      const Vector w = ftran(best);
      const int leaving = head_[p];
      pos_[leaving] = -1;
      state_[leaving] = VarState::kAtLower;
      x_[leaving] = 0.0;
      set_basic(best, p);
      pivot(p, w);
      ++since_refactor_;
    }
    refactor();
  }

  const Matrix& a_;
  const Vector& b_;
  int rows_;
  int nstruct_;
  int neq_;
  int nslack_;
  int ncols_;
  LpOptions opt_;
  Vector lo_, hi_, x_, cost2_;
  std::vector<VarState> state_;
  std::vector<int> pos_;
  std::vector<int> head_;
  std::vector<double> art_sign_;
  Matrix binv_;
  int iterations_ = 0;
  int since_refactor_ = 0;
  int max_iter_ = 0;
  double phase1_residual_ = 0.0;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, const LpOptions& options) {
  lp.validate();
  if (const std::string path = resolve_dump_path(options); !path.empty()) {
    std::ofstream out(path);
    if (out) write_lp_dump(lp, out);
  }
  const int n = lp.num_vars();
  const int neq = lp.num_eq();
  const int nin = lp.num_in();
  const int rows = neq + nin;

  Matrix a(rows, n);
  Vector b(rows);
  if (neq > 0) {
    a.topRows(neq) = lp.a_eq;
    b.head(neq) = lp.b_eq;
  }
  if (nin > 0) {
    a.bottomRows(nin) = lp.a_in;
    b.tail(nin) = lp.b_in;
  }

  // Power-of-two equilibration keeps the unscaling exact.
  Vector row_scale = Vector::Ones(rows);
  Vector col_scale = Vector::Ones(n);
  if (options.scale) {
    for (int i = 0; i < rows; ++i) {
      row_scale[i] = pow2_scale(a.row(i).cwiseAbs().maxCoeff());
      a.row(i) *= row_scale[i];
    }
    for (int j = 0; j < n; ++j) {
      col_scale[j] = rows > 0 ? pow2_scale(a.col(j).cwiseAbs().maxCoeff()) : 1.0;
      a.col(j) *= col_scale[j];
    }
    b = b.cwiseProduct(row_scale);
  }
  const Vector cost = lp.c.cwiseProduct(col_scale);
  const Vector lower = lp.lower.cwiseQuotient(col_scale);
  const Vector upper = lp.upper.cwiseQuotient(col_scale);

  LpSolution sol;
  sol.z = Vector::Zero(n);
  sol.eq_duals = Vector::Zero(neq);
  sol.in_duals = Vector::Zero(nin);
  sol.reduced_costs = Vector::Zero(n);

  if (rows == 0) {
    // Separable: each variable sits at its cheaper bound.
    for (int j = 0; j < n; ++j) {
      const double cj = lp.c[j];
      double zj;
      if (cj > 0.0) zj = lp.lower[j];
      else if (cj < 0.0) zj = lp.upper[j];
      else zj = std::isfinite(lp.lower[j]) ? lp.lower[j]
                : std::isfinite(lp.upper[j]) ? lp.upper[j] : 0.0;
      if (!std::isfinite(zj)) {
        sol.status = LpStatus::kUnbounded;
        return sol;
      }
      sol.z[j] = zj;
    }
    sol.reduced_costs = lp.c;
    sol.objective = lp.c.dot(sol.z);
    sol.status = LpStatus::kOptimal;
    return sol;
  }

  Simplex simplex(a, b, neq, cost, lower, upper, options);
  sol.status = simplex.run();
  sol.iterations = simplex.iterations();
  sol.phase1_residual = simplex.phase1_residual();
  if (sol.status != LpStatus::kOptimal) return sol;

  const Vector& x = simplex.x();
  for (int j = 0; j < n; ++j) {
    if (simplex.at_lower(j)) sol.z[j] = lp.lower[j];
    else if (simplex.at_upper(j)) sol.z[j] = lp.upper[j];
    else sol.z[j] = std::clamp(x[j] * col_scale[j], lp.lower[j], lp.upper[j]);
  }
  const Vector y_scaled = simplex.duals(simplex.phase2_cost());
  const Vector y = y_scaled.cwiseProduct(row_scale);
  sol.eq_duals = y.head(neq);
  sol.in_duals = y.tail(nin);
  for (int i = 0; i < nin; ++i) sol.in_duals[i] = std::min(sol.in_duals[i], 0.0);
  sol.reduced_costs = lp.c;
  if (neq > 0) sol.reduced_costs -= lp.a_eq.transpose() * sol.eq_duals;
  if (nin > 0) sol.reduced_costs -= lp.a_in.transpose() * sol.in_duals;
  sol.objective = lp.c.dot(sol.z);
  return sol;
}

KktReport check_kkt(const LinearProgram& lp, const LpSolution& sol) {
  const Eigen::Index n = lp.c.size();
  require(sol.z.size() == n && sol.reduced_costs.size() == n &&
              sol.eq_duals.size() == lp.a_eq.rows() &&
              sol.in_duals.size() == lp.a_in.rows(),
          ErrorKind::kDimensionMismatch, "solution does not match LP shape");
  KktReport r;
  const Vector& z = sol.z;
  if (lp.num_eq() > 0) {
    r.primal = std::max(r.primal, (lp.a_eq * z - lp.b_eq).cwiseAbs().maxCoeff());
  }
  Vector in_slack;
  if (lp.num_in() > 0) {
    in_slack = lp.b_in - lp.a_in * z;
    r.primal = std::max(r.primal, (-in_slack).cwiseMax(0.0).maxCoeff());
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    r.primal = std::max({r.primal, lp.lower[j] - z[j], z[j] - lp.upper[j]});
  }

  Vector stationarity = lp.c - sol.reduced_costs;
  if (lp.num_eq() > 0) stationarity -= lp.a_eq.transpose() * sol.eq_duals;
  if (lp.num_in() > 0) stationarity -= lp.a_in.transpose() * sol.in_duals;
  r.dual = stationarity.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < sol.in_duals.size(); ++i) {
    r.dual = std::max(r.dual, sol.in_duals[i]);
    r.complementarity =
        std::max(r.complementarity, std::abs(sol.in_duals[i] * in_slack[i]));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dj = sol.reduced_costs[j];
    if (dj > 0.0) {
      if (std::isfinite(lp.lower[j])) {
        r.complementarity = std::max(r.complementarity, dj * (z[j] - lp.lower[j]));
      } else {
        r.dual = std::max(r.dual, dj);
      }
    } else if (dj < 0.0) {
      if (std::isfinite(lp.upper[j])) {
        r.complementarity = std::max(r.complementarity, -dj * (lp.upper[j] - z[j]));
      } else {
        r.dual = std::max(r.dual, -dj);
      }
    }
  }
  return r;
}

int count_interior(const LinearProgram& lp, const Vector& z, double tol) {
  int count = 0;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (z[j] > lp.lower[j] + tol && z[j] < lp.upper[j] - tol) ++count;
  }
  return count;
}

int count_active_rows(const LinearProgram& lp, const Vector& z, double tol) {
  int count = lp.num_eq();
  if (lp.num_in() > 0) {
    const Vector slack = lp.b_in - lp.a_in * z;
    for (Eigen::Index i = 0; i < slack.size(); ++i) {
      if (std::abs(slack[i]) <= tol) ++count;
    }
  }
  return count;
}

}  // namespace sparsectl
