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

#ifndef SPARSECTL_ERROR_HPP_
#define SPARSECTL_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace sparsectl {

enum class ErrorKind {
  kInvalidArgument,
  kDimensionMismatch,
  kNonBinary,
  kTerminalDrift,
  kNoConvergence,
  kRankDeficient,
  kInternal,
  kIo,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type. `value()` carries the
// diagnostic number attached to the failure (interior fraction for
// kNonBinary, terminal residual for kTerminalDrift, rank for kRankDeficient,
// best residual for kNoConvergence); it is 0 otherwise.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, double value = 0.0)
      : std::runtime_error(what), kind_(kind), value_(value) {}

  ErrorKind kind() const noexcept { return kind_; }
  double value() const noexcept { return value_; }

 private:
  ErrorKind kind_;
  double value_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what,
                              double value = 0.0) {
  throw Error(kind, what, value);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace sparsectl

#endif  // SPARSECTL_ERROR_HPP_
