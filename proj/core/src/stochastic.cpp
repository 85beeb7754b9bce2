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

#include "sparsectl/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "sparsectl/error.hpp"

namespace sparsectl {

std::int64_t StochasticState::total() const {
  std::int64_t t = 0;
  for (auto x : f) t += x;
  for (auto x : v) t += x;
  return t;
}

Vector StochasticState::as_vector() const {
  Vector x(v.size() + f.size());
  for (std::size_t i = 0; i < v.size(); ++i) x[i] = static_cast<double>(v[i]);
  for (std::size_t p = 0; p < f.size(); ++p) x[v.size() + p] = static_cast<double>(f[p]);
  return x;
}

void StepStats::merge(const StepStats& other) {
  truncated += other.truncated;
  clamped_demand += other.clamped_demand;
  clamped_control += other.clamped_control;
  large_rate = large_rate || other.large_rate;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t run) {
  std::uint64_t state = seed;
  const std::uint64_t base = splitmix64(state);
  state = base ^ (run * 0xD1B54A32D192ED03ULL);
  return splitmix64(state);
}

StochasticState step(const StochasticState& state, const IndexMap& index,
                     const StepRates& rates, double delta, Engine& rng,
                     std::vector<double>& accumulator, StepStats* stats) {
  const int s = index.stations();
  const int m = index.pairs();
  require(static_cast<int>(state.v.size()) == s && static_cast<int>(state.f.size()) == m,
          ErrorKind::kDimensionMismatch, "state does not match the index map");
  require(rates.g.size() == m && rates.u.size() == m && rates.gamma.size() == m,
          ErrorKind::kDimensionMismatch, "rates must be given per route");
  require(delta > 0.0, ErrorKind::kInvalidArgument, "delta must be positive");
  if (static_cast<int>(accumulator.size()) != m) accumulator.assign(m, 0.0);
  StepStats local;

  std::vector<std::int64_t> arrivals(m, 0);
  std::vector<std::int64_t> requests(m, 0);
  for (int p = 0; p < m; ++p) {
    const double prob = -std::expm1(-rates.gamma[p] * delta);
    if (state.f[p] > 0 && prob > 0.0) {
      arrivals[p] = std::binomial_distribution<std::int64_t>(state.f[p], prob)(rng);
    }
    double g = rates.g[p];
    if (g < 0.0) {
      local.clamped_demand += -g * delta;
      g = 0.0;
    }
    double u = rates.u[p];
    if (u < 0.0) {
      local.clamped_control += -u * delta;
      u = 0.0;
    }
    if (g * delta > 1.0 || u * delta > 1.0) local.large_rate = true;
    if (g > 0.0) requests[p] = std::poisson_distribution<std::int64_t>(g * delta)(rng);
    accumulator[p] += u * delta;
    const double whole = std::floor(accumulator[p]);
    accumulator[p] -= whole;
    requests[p] += static_cast<std::int64_t>(whole);
  }

  // Departures from an origin cannot exceed its parked vehicles; excess
  // requests are refused uniformly at random.
  std::vector<std::int64_t> departures = requests;
  std::vector<int> labels;
  for (int j = 0; j < s; ++j) {
    std::int64_t wanted = 0;
    for (int i = 0; i < s; ++i) {
      if (i != j) wanted += requests[index.index(i, j)];
    }
    if (wanted <= state.v[j]) continue;
    labels.clear();
    for (int i = 0; i < s; ++i) {
      if (i == j) continue;
      const int p = index.index(i, j);
      labels.insert(labels.end(), static_cast<std::size_t>(requests[p]), p);
      departures[p] = 0;
    }
    std::shuffle(labels.begin(), labels.end(), rng);
    for (std::int64_t r = 0; r < state.v[j]; ++r) ++departures[labels[r]];
    local.truncated += wanted - state.v[j];
  }

  StochasticState next = state;
  for (int p = 0; p < m; ++p) {
    const auto [i, j] = index.pair(p);
    next.f[p] += departures[p] - arrivals[p];
    next.v[j] -= departures[p];
    next.v[i] += arrivals[p];
  }
  if (stats != nullptr) stats->merge(local);
  return next;
}

namespace {

struct Kahan {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

MonteCarloSummary run_monte_carlo(const SimulationInput& input,
                                  const SimulationConfig& config) {
  const MobilityScenario& sc = input.scenario;
  sc.validate();
  require(config.runs >= 1, ErrorKind::kInvalidArgument, "need at least one run");
  require(std::isfinite(config.delta) && config.delta > 0.0,
          ErrorKind::kInvalidArgument, "delta must be positive");
  const IndexMap index(sc.num_stations());
  const int s = index.stations();
  const int m = index.pairs();
  const int n = index.state_dim();
  const double T = sc.horizon_hours;
  const int steps = std::max(1, static_cast<int>(std::llround(T / config.delta)));
  const double delta = T / steps;
  if (input.source == RateSource::kExplicit) {
    require(input.g.size() == m, ErrorKind::kDimensionMismatch,
            "explicit demand needs one rate per route");
  }
  const bool has_u = input.u.size() > 0;
  if (has_u) {
    require(input.u.cols() == m && input.u.rows() == input.u_grid.steps(),
            ErrorKind::kDimensionMismatch, "control does not match routes or grid");
    require(std::abs(input.u_grid.horizon() - T) <= 1e-9 * T,
            ErrorKind::kInvalidArgument, "control horizon differs from the scenario");
  }

  // Control row in force during simulation step i.
  Matrix u_steps = Matrix::Zero(steps, m);
  if (has_u) {
    for (int i = 0; i < steps; ++i) {
      const double t = (i + 0.5) * delta;
      const int k = std::min(input.u_grid.steps() - 1,
                             static_cast<int>(std::floor(t / input.u_grid.dt())));
      u_steps.row(i) = input.u.row(k);
    }
  }
  Vector g_const = Vector::Zero(m);
  if (input.source == RateSource::kExplicit) g_const = input.g;
  if (input.source == RateSource::kBase) g_const = sc.gbar;

  MonteCarloSummary out;
  out.runs = config.runs;
  out.times.resize(steps + 1);
  for (int i = 0; i <= steps; ++i) out.times[i] = i == steps ? T : i * delta;
  for (int i = 0; i < s; ++i) out.components.push_back("v" + std::to_string(i + 1));
  for (int p = 0; p < m; ++p) {
    const auto [i, j] = index.pair(p);
    out.components.push_back("f" + std::to_string(i + 1) + "," + std::to_string(j + 1));
  }

  StochasticState start;
  start.v.resize(s);
  start.f.assign(m, 0);
  for (int i = 0; i < s; ++i) {
    start.v[i] = static_cast<std::int64_t>(std::llround(sc.stations[i].initial));
  }

  std::vector<Kahan> s1(static_cast<std::size_t>(n) * (steps + 1));
  std::vector<Kahan> s2(s1.size());
  const auto record = [&](const StochasticState& st, int knot) {
    const Vector x = st.as_vector();
    for (int c = 0; c < n; ++c) {
      const std::size_t at = static_cast<std::size_t>(knot) * n + c;
      s1[at].add(x[c]);
      s2[at].add(x[c] * x[c]);
    }
  };

  StepRates rates{g_const, Vector::Zero(m), sc.gamma};
  std::vector<double> acc;
  for (int r = 0; r < config.runs; ++r) {
    Engine rng(split_seed(config.seed, static_cast<std::uint64_t>(r)));
    acc.assign(m, 0.0);
    StochasticState st = start;
    record(st, 0);
    for (int i = 0; i < steps; ++i) {
      if (input.source == RateSource::kPricing) {
        rates.g = effective_demand(sc, index, st.as_vector()).g;
      }
      rates.u = u_steps.row(i).transpose();
      st = step(st, index, rates, delta, rng, acc, &out.stats);
      record(st, i + 1);
    }
  }

  // Mean-field reference on the same step grid.
  const bool pricing = input.source == RateSource::kPricing;
  const SystemMatrices frozen = pricing ? build_system_matrices(sc, index)
                                        : build_transit_matrices(sc, index);
  LtvSystem ode_sys;
  ode_sys.state_dim = n;
  ode_sys.input_dim = m;
  ode_sys.horizon = T;
  ode_sys.time_invariant = true;
  ode_sys.provider = [frozen](double) { return frozen; };
  Matrix w = u_steps.cwiseMax(0.0);
  if (!pricing) w.rowwise() += g_const.cwiseMax(0.0).transpose();
  out.ode = propagate_state(ode_sys, start.as_vector(), w, TimeGrid(T, steps));

  const double N = config.runs;
  out.mean.resize(n, steps + 1);
  out.variance.resize(n, steps + 1);
  out.std_error.resize(n, steps + 1);
  out.zscore.resize(n, steps + 1);
  double sq = 0.0;
  for (int k = 0; k <= steps; ++k) {
    for (int c = 0; c < n; ++c) {
      const std::size_t at = static_cast<std::size_t>(k) * n + c;
      const double mean = s1[at].sum / N;
      const double var =
          N > 1 ? std::max(0.0, (s2[at].sum - N * mean * mean) / (N - 1)) : 0.0;
      const double diff = mean - out.ode(c, k);
      // An integer count with mean mu has variance at least frac(mu)(1 - frac(mu)).
      const double frac = out.ode(c, k) - std::floor(out.ode(c, k));
      const double se = std::sqrt(std::max(var, frac * (1.0 - frac)) / N);
      double z = 0.0;
      if (se > 0.0) z = diff / se;
      else if (std::abs(diff) > 1e-9 * std::max(1.0, std::abs(out.ode(c, k)))) z = std::numeric_limits<double>::infinity();
      out.mean(c, k) = mean;
      out.variance(c, k) = var;
      out.std_error(c, k) = se;
      out.zscore(c, k) = z;
      out.max_abs_z = std::max(out.max_abs_z, std::abs(z));
      sq += diff * diff;
    }
  }
  out.rms_deviation = std::sqrt(sq / (static_cast<double>(n) * (steps + 1)));
  return out;
}

void write_summary_csv(const MonteCarloSummary& summary, std::ostream& out) {
  out << "t,component,mc_mean,mc_se,ode_value,zscore\n";
  char buf[256];
  for (std::size_t k = 0; k < summary.times.size(); ++k) {
    for (std::size_t c = 0; c < summary.components.size(); ++c) {
      const auto kk = static_cast<Eigen::Index>(k);
      const auto cc = static_cast<Eigen::Index>(c);
      std::snprintf(buf, sizeof(buf), "%.10g,\"%s\",%.10g,%.6g,%.10g,%.6g\n",
                    summary.times[k], summary.components[c].c_str(),
                    summary.mean(cc, kk), summary.std_error(cc, kk),
                    summary.ode(cc, kk), summary.zscore(cc, kk));
      out << buf;
    }
  }
}

}  // namespace sparsectl
