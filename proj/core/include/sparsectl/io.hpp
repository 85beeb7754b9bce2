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

#ifndef SPARSECTL_IO_HPP_
#define SPARSECTL_IO_HPP_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sparsectl/mobility.hpp"
#include "sparsectl/rebalance.hpp"
#include "sparsectl/scheduling.hpp"

namespace sparsectl {

using Json = nlohmann::json;

// {"A": [[..]], "B": [[..]], "T": 1, "alpha": [..] or scalar, "beta": 2}
ScheduleInstance instance_from_json(const Json& doc);
Json instance_to_json(const ScheduleInstance& instance);

// Route-keyed maps use "i,j" (to i from j, 1-based).
MobilityScenario scenario_from_json(const Json& doc);
Json scenario_to_json(const MobilityScenario& scenario);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

std::string pair_key(int i, int j);  // 0-based in, 1-based out

// t_k, v_1..v_m per row.
std::string schedule_csv(const Schedule& schedule);
// Per channel, the maximal runs of active cells as [start, end] times.
Json gantt_json(const Schedule& schedule, double threshold = 0.5);

Json census_json(const CostCensus& census);
// Controls as sparse (k, "i,j", value) triplets; cells with |u| <= 1e-12 omitted.
Json controls_json(const ControlTrajectory& control, const IndexMap& index);
struct LoadedControls {
  TimeGrid grid;
  Matrix u;
};
LoadedControls controls_from_json(const Json& doc, const IndexMap& index);

std::string state_csv(const Matrix& states, const TimeGrid& grid);

// 64-bit FNV-1a, printed as 16 hex digits.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t value);

struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  Json grid = Json::object();
  std::string version;
  double wall_seconds = 0;
  std::map<std::string, std::string> digests;  // file name -> hex digest

  Json to_json() const;
};

}  // namespace sparsectl

#endif  // SPARSECTL_IO_HPP_
