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

#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oracles/oracles.hpp"

namespace oracle {

double schedule_brute_force(const Matrix& scores, double dt, const Vector& alpha, int beta) {
  const auto K = static_cast<int>(scores.rows());
  const auto m = static_cast<int>(scores.cols());
  const int cells = K * m;
  if (cells > 24) throw std::invalid_argument("brute force limited to 24 cells");
  std::vector<int> cap(m);
  for (int j = 0; j < m; ++j) cap[j] = static_cast<int>(std::floor(alpha[j] / dt + 1e-9));
  double best = 0.0;
  std::vector<int> used(m);
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    std::fill(used.begin(), used.end(), 0);
    bool ok = true;
    double value = 0.0;
    for (int k = 0; k < K && ok; ++k) {
      int row = 0;
      for (int j = 0; j < m; ++j) {
        if (mask & (1u << (k * m + j))) {
          ++row;
          ++used[j];
          value += dt * scores(k, j);
        }
      }
      ok = row <= beta;
    }
    for (int j = 0; j < m && ok; ++j) ok = used[j] <= cap[j];
    if (ok && value > best) best = value;
  }
  return best;
}

double top_slice_brute_force(const Matrix& scores, double dt, int count) {
  const auto K = static_cast<int>(scores.rows());
  const auto m = static_cast<int>(scores.cols());
  const int cells = K * m;
  if (cells > 24) throw std::invalid_argument("brute force limited to 24 cells");
  double best = -1.0;
  for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
    if (std::popcount(mask) != count) continue;
    double value = 0.0;
    for (int c = 0; c < cells; ++c) {
      if (mask & (1u << c)) value += dt * scores(c / m, c % m);
    }
    if (value > best) best = value;
  }
  return best;
}

double level_for_measure(const std::function<double(double)>& f, double horizon,
                         double alpha) {
  // Crossing time of level c for decreasing f.
  const auto crossing = [&](double c) {
    if (f(0.0) <= c) return 0.0;
    if (f(horizon) > c) return horizon;
    double lo = 0.0;
    double hi = horizon;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) > c ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  double lo = f(horizon);
  double hi = f(0.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (crossing(mid) > alpha ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace oracle
