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

#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <string>

#include "sparsectl/lp.hpp"

namespace sparsectl {

namespace {

std::string name(char prefix, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%c%07d", prefix, index);
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%12.6g", v);
  return buf;
}

// Fields start at columns 2, 5, 15, 25, 40, 50.
void entry(std::ostream& out, const char* code, const std::string& n1,
           const std::string& n2, double v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), " %-2s %-8s  %-8s  %s", code, n1.c_str(),
                n2.c_str(), num(v).c_str());
  out << buf << '\n';
}

}  // namespace

void write_lp_dump(const LinearProgram& lp, std::ostream& out) {
  const int n = lp.num_vars();
  const int neq = lp.num_eq();
  const int nin = lp.num_in();
  out << "NAME          SPARSECTL\n";
  out << "ROWS\n";
  out << " N  COST\n";
  for (int i = 0; i < neq; ++i) out << " E  " << name('E', i) << '\n';
  for (int i = 0; i < nin; ++i) out << " L  " << name('L', i) << '\n';
  out << "COLUMNS\n";
  for (int j = 0; j < n; ++j) {
    const std::string col = name('X', j);
    if (lp.c[j] != 0.0) entry(out, "", col, "COST", lp.c[j]);
    for (int i = 0; i < neq; ++i) {
      if (lp.a_eq(i, j) != 0.0) entry(out, "", col, name('E', i), lp.a_eq(i, j));
    }
    for (int i = 0; i < nin; ++i) {
      if (lp.a_in(i, j) != 0.0) entry(out, "", col, name('L', i), lp.a_in(i, j));
    }
  }
  out << "RHS\n";
  for (int i = 0; i < neq; ++i) {
    if (lp.b_eq[i] != 0.0) entry(out, "", "RHS", name('E', i), lp.b_eq[i]);
  }
  for (int i = 0; i < nin; ++i) {
    if (lp.b_in[i] != 0.0) entry(out, "", "RHS", name('L', i), lp.b_in[i]);
  }
  out << "BOUNDS\n";
  for (int j = 0; j < n; ++j) {
    const std::string col = name('X', j);
    const double lo = lp.lower[j];
    const double hi = lp.upper[j];
    if (lo == hi) {
      entry(out, "FX", "BND", col, lo);
      continue;
    }
    if (lo == -kInf && hi == kInf) {
      out << " FR BND       " << col << '\n';
      continue;
    }
    if (lo == -kInf) out << " MI BND       " << col << '\n';
    else if (lo != 0.0) entry(out, "LO", "BND", col, lo);
    if (hi != kInf) entry(out, "UP", "BND", col, hi);
  }
  out << "ENDATA\n";
}

std::string resolve_dump_path(const LpOptions& options) {
  if (!options.dump_path.empty()) return options.dump_path;
  if (const char* env = std::getenv("SPARSECTL_LP_DUMP"); env != nullptr) return env;
  return {};
}

}  // namespace sparsectl
