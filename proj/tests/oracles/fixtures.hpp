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

#ifndef SPARSECTL_TESTS_FIXTURES_HPP_
#define SPARSECTL_TESTS_FIXTURES_HPP_

#include <random>

#include "sparsectl/mobility.hpp"
#include "sparsectl/scheduling.hpp"

namespace fixture {

using namespace sparsectl;

// Four-node example network, every node a candidate input.
inline ScheduleInstance four_node(int beta = 2, double alpha = 0.4) {
  ScheduleInstance in;
  in.system.a.resize(4, 4);
  in.system.a << -0.6, 0.0, -0.6, 0.2,
                 -0.5, 0.0, 0.0, 0.4,
                  1.0, 0.6, 0.0, 0.5,
                  0.0, 0.0, 0.9, -0.3;
  in.system.b = Matrix::Identity(4, 4);
  in.system.horizon = 1.0;
  in.alpha = Vector::Constant(4, alpha);
  in.beta = beta;
  return in;
}

// Two stations, no pricing drift: (30, 10) parked must end equal.
inline MobilityScenario two_station(double horizon = 16.0) {
  MobilityScenario sc;
  sc.stations = {{1, 0.0, 0.0, 30.0}, {2, 5.0, 0.0, 10.0}};
  sc.horizon_hours = horizon;
  sc.beta = 1;
  sc.gamma = Vector::Constant(2, 2.0);
  sc.theta = Vector::Constant(2, 0.2);
  sc.lambda = Vector::Zero(2);
  sc.gbar = Vector::Constant(2, 1.0);
  sc.target.mode = TargetMode::kEqualize;
  return sc;
}

// Three stations with constant demand for the Monte-Carlo checks.
inline MobilityScenario three_station() {
  MobilityScenario sc;
  sc.stations = {{1, 0.0, 0.0, 60.0}, {2, 4.0, 0.0, 60.0}, {3, 0.0, 3.0, 60.0}};
  sc.horizon_hours = 4.0;
  sc.beta = 2;
  sc.gamma.resize(6);
  sc.gamma << 1.5, 2.0, 1.0, 2.5, 3.0, 1.2;
  sc.theta = Vector::Constant(6, 0.2);
  sc.lambda = Vector::Zero(6);
  sc.gbar.resize(6);
  sc.gbar << 2.0, 1.0, 1.5, 3.0, 0.5, 2.5;
  return sc;
}

inline Matrix random_matrix(int r, int c, std::mt19937_64& rng, double lo = -1.0,
                            double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < c; ++j) m(i, j) = u(rng);
  }
  return m;
}

}  // namespace fixture

#endif  // SPARSECTL_TESTS_FIXTURES_HPP_
