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

#include "sparsectl/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "sparsectl/error.hpp"

namespace sparsectl {

const char* to_string(TargetMode mode) {
  switch (mode) {
    case TargetMode::kEqualize: return "equalize";
    case TargetMode::kStations: return "stations";
    case TargetMode::kFull: return "full";
  }
  return "equalize";
}

TargetMode parse_target_mode(const std::string& text) {
  if (text == "equalize") return TargetMode::kEqualize;
  if (text == "stations") return TargetMode::kStations;
  if (text == "full") return TargetMode::kFull;
  fail(ErrorKind::kInvalidArgument, "unknown target mode '" + text + "'");
}

double MobilityScenario::fleet() const {
  double total = 0.0;
  for (const Station& st : stations) total += st.initial;
  return total;
}

Vector MobilityScenario::initial_state() const {
  const int s = num_stations();
  Vector x = Vector::Zero(s * s);
  for (int i = 0; i < s; ++i) x[i] = stations[i].initial;
  return x;
}

Vector MobilityScenario::nominal_target() const {
  const int s = num_stations();
  Vector x = Vector::Zero(s * s);
  if (target.stations.size() == s) {
    x.head(s) = target.stations;
  } else {
    x.head(s).setConstant(fleet() / s);
  }
  if (target.in_transit.size() == s * s - s) x.tail(s * s - s) = target.in_transit;
  return x;
}

void MobilityScenario::validate() const {
  const int s = num_stations();
  require(s >= 2, ErrorKind::kInvalidArgument, "scenario needs at least 2 stations");
  const int m = s * s - s;
  for (int i = 0; i < s; ++i) {
    require(stations[i].id == i + 1, ErrorKind::kInvalidArgument,
            "station ids must run 1..s in order");
    require(std::isfinite(stations[i].initial) && stations[i].initial >= 0.0,
            ErrorKind::kInvalidArgument, "initial counts must be >= 0");
  }
  require(gamma.size() == m && theta.size() == m && lambda.size() == m &&
              gbar.size() == m,
          ErrorKind::kDimensionMismatch, "missing route coefficient");
  for (int p = 0; p < m; ++p) {
    require(std::isfinite(gamma[p]) && gamma[p] > 0.0, ErrorKind::kInvalidArgument,
            "gamma must be positive");
    require(std::isfinite(theta[p]) && theta[p] > 0.0, ErrorKind::kInvalidArgument,
            "theta must be positive");
    require(std::isfinite(lambda[p]) && lambda[p] >= 0.0,
            ErrorKind::kInvalidArgument, "lambda must be nonnegative");
    require(std::isfinite(gbar[p]) && gbar[p] >= 0.0, ErrorKind::kInvalidArgument,
            "gbar must be nonnegative");
  }
  require(std::isfinite(horizon_hours) && horizon_hours > 0.0,
          ErrorKind::kInvalidArgument, "horizon must be positive");
  require(beta >= 1 && beta <= m - 1, ErrorKind::kInvalidArgument,
          "beta must lie in 1..m-1");
  require(target.stations.size() == 0 || target.stations.size() == s,
          ErrorKind::kDimensionMismatch, "target station vector has wrong size");
  require(target.in_transit.size() == 0 || target.in_transit.size() == m,
          ErrorKind::kDimensionMismatch, "target in-transit vector has wrong size");
  require(target.stations.allFinite() && target.in_transit.allFinite(),
          ErrorKind::kInvalidArgument, "target must be finite");
}

IndexMap::IndexMap(int s) : s_(s) {
  require(s >= 2, ErrorKind::kInvalidArgument, "index map needs s >= 2");
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) {
      if (i != j) pairs_.emplace_back(i, j);
    }
  }
}

int IndexMap::index(int i, int j) const {
  require(i >= 0 && i < s_ && j >= 0 && j < s_ && i != j,
          ErrorKind::kInvalidArgument, "no such route");
  return i * (s_ - 1) + (j < i ? j : j - 1);
}

IndexMap build_index_map(int s) { return IndexMap(s); }

namespace {

SystemMatrices assemble(const MobilityScenario& sc, const IndexMap& index,
                        bool pricing) {
  sc.validate();
  const int s = index.stations();
  require(sc.num_stations() == s, ErrorKind::kDimensionMismatch,
          "index map does not match scenario");
  const int n = index.state_dim();
  const int m = index.pairs();
  SystemMatrices out{Matrix::Zero(n, n), Matrix::Zero(n, m)};
  Matrix& a = out.a;
  Matrix& b = out.b;
  for (int p = 0; p < m; ++p) {
    const auto [i, j] = index.pair(p);
    const int f = index.state_of_pair(p);
    a(f, f) = -sc.gamma[p];
    a(i, f) += sc.gamma[p];
    if (pricing) {
      const double out_rate = sc.theta[p] * sc.lambda[p];
      const double back_rate = sc.theta[p] * sc.lambda[index.index(j, i)];
      a(f, i) -= out_rate;
      a(f, j) += back_rate;
      a(j, i) += out_rate;
      a(j, j) -= back_rate;
    }
    b(f, p) = 1.0;
    b(j, p) = -1.0;
  }
  return out;
}

// 53-bit uniform on [0, 1) from a 64-bit engine.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

}  // namespace

SystemMatrices build_system_matrices(const MobilityScenario& scenario,
                                     const IndexMap& index, double) {
  return assemble(scenario, index, true);
}

SystemMatrices build_transit_matrices(const MobilityScenario& scenario,
                                      const IndexMap& index, double) {
  return assemble(scenario, index, false);
}

MobilityModel build_model(const MobilityScenario& scenario) {
  scenario.validate();
  IndexMap index(scenario.num_stations());
  const SystemMatrices frozen = build_system_matrices(scenario, index);
  LtvSystem sys;
  sys.state_dim = index.state_dim();
  sys.input_dim = index.pairs();
  sys.horizon = scenario.horizon_hours;
  sys.time_invariant = true;
  sys.provider = [frozen](double) { return frozen; };
  return MobilityModel{scenario, std::move(index), std::move(sys)};
}

Demand effective_demand(const MobilityScenario& scenario, const IndexMap& index,
                        const Vector& x, double) {
  require(x.size() == index.state_dim(), ErrorKind::kDimensionMismatch,
          "state has wrong dimension");
  const int m = index.pairs();
  Demand d{Vector(m), Vector(m), 0};
  for (int p = 0; p < m; ++p) {
    const auto [i, j] = index.pair(p);
    const double tilt =
        scenario.lambda[p] * x[i] - scenario.lambda[index.index(j, i)] * x[j];
    d.g[p] = -scenario.theta[p] * tilt;
    d.price[p] = scenario.gbar[p] / scenario.theta[p] + tilt;
    if (d.g[p] < 0.0) ++d.negative;
  }
  return d;
}

TerminalConstraint terminal_constraint(const MobilityScenario& scenario,
                                       const IndexMap& index) {
  const int s = index.stations();
  const int n = index.state_dim();
  TerminalConstraint tc;
  tc.nominal = scenario.nominal_target();
  switch (scenario.target.mode) {
    case TargetMode::kEqualize:
      tc.c = Matrix::Zero(s - 1, n);
      for (int i = 0; i + 1 < s; ++i) {
        tc.c(i, i) = 1.0;
        tc.c(i, i + 1) = -1.0;
      }
      tc.d = Vector::Zero(s - 1);
      break;
    case TargetMode::kStations:
      tc.c = Matrix::Zero(s, n);
      for (int i = 0; i < s; ++i) tc.c(i, i) = 1.0;
      tc.d = tc.nominal.head(s);
      break;
    case TargetMode::kFull:
      tc.c = Matrix::Identity(n, n);
      tc.d = tc.nominal;
      break;
  }
  return tc;
}

double congestion_at(const ScenarioConfig& config, double x_km, double y_km) {
  const double w = config.congestion_width_km;
  return 1.0 + config.congestion_peak * std::exp(-(x_km * x_km + y_km * y_km) / (2.0 * w * w));
}

MobilityScenario generate_random_scenario(int s, std::uint64_t seed,
                                          const ScenarioConfig& config) {
  require(s >= 2, ErrorKind::kInvalidArgument, "scenario needs at least 2 stations");
  require(config.radius_km > 0.0 && config.speed_kmh > 0.0 &&
              config.total_vehicles >= 0.0 && config.coef_low <= config.coef_high &&
              config.initial_spread >= 0.0 && config.initial_spread < 1.0,
          ErrorKind::kInvalidArgument, "bad scenario configuration");
  std::mt19937_64 rng(seed);
  const IndexMap index(s);
  const int m = index.pairs();

  MobilityScenario sc;
  sc.horizon_hours = config.horizon_hours;
  sc.beta = std::min(config.beta, m - 1);
  sc.target.mode = config.target;
  sc.stations.resize(s);
  for (int i = 0; i < s; ++i) {
    const double r = config.radius_km * std::sqrt(uniform01(rng));
    const double phi = 2.0 * M_PI * uniform01(rng);
    sc.stations[i].id = i + 1;
    sc.stations[i].x_km = r * std::cos(phi);
    sc.stations[i].y_km = r * std::sin(phi);
  }

  // Largest-remainder split of the fleet over perturbed weights.
  std::vector<double> w(s);
  for (double& wi : w) wi = 1.0 + config.initial_spread * uniform(rng, -1.0, 1.0);
  const double wsum = std::accumulate(w.begin(), w.end(), 0.0);
  const double total = config.total_vehicles;
  if (total == std::floor(total)) {
    std::vector<double> frac(s);
    double assigned = 0.0;
    for (int i = 0; i < s; ++i) {
      const double raw = total * w[i] / wsum;
      sc.stations[i].initial = std::floor(raw);
      frac[i] = raw - std::floor(raw);
      assigned += sc.stations[i].initial;
    }
    std::vector<int> order(s);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return frac[a] > frac[b]; });
    for (int r = 0; assigned < total; ++r, assigned += 1.0) {
      sc.stations[order[r % s]].initial += 1.0;
    }
  } else {
    for (int i = 0; i < s; ++i) sc.stations[i].initial = total * w[i] / wsum;
  }

  sc.gamma.resize(m);
  sc.theta.resize(m);
  sc.lambda.resize(m);
  sc.gbar.resize(m);
  for (int p = 0; p < m; ++p) {
    const auto [i, j] = index.pair(p);
    const Station& a = sc.stations[i];
    const Station& b = sc.stations[j];
    const double dist = std::max(config.min_distance_km,
                                 std::hypot(a.x_km - b.x_km, a.y_km - b.y_km));
    const double cong =
        congestion_at(config, 0.5 * (a.x_km + b.x_km), 0.5 * (a.y_km + b.y_km));
    sc.gamma[p] = config.speed_kmh / (dist * cong);
  }
  for (int p = 0; p < m; ++p) {
    sc.theta[p] =
        std::max(config.theta_min, uniform(rng, config.coef_low, config.coef_high));
  }
  for (int p = 0; p < m; ++p) {
    const auto [i, j] = index.pair(p);
    if (config.symmetric_lambda && j < i) {
      sc.lambda[p] = sc.lambda[index.index(j, i)];
    } else {
      sc.lambda[p] = uniform(rng, config.coef_low, config.coef_high);
    }
  }
  for (int p = 0; p < m; ++p) sc.gbar[p] = uniform(rng, config.gbar_low, config.gbar_high);
  sc.validate();
  return sc;
}

}  // namespace sparsectl
