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

#include "sparsectl/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "sparsectl/error.hpp"

namespace sparsectl {

namespace {

Matrix matrix_from_json(const Json& rows, const char* name) {
  if (!rows.is_array() || rows.empty()) {
    fail(ErrorKind::kInvalidArgument, std::string(name) + " must be a non-empty array of rows");
  }
  const auto r = static_cast<Eigen::Index>(rows.size());
  const auto c = static_cast<Eigen::Index>(rows[0].is_array() ? rows[0].size() : 0);
  if (c == 0) fail(ErrorKind::kInvalidArgument, std::string(name) + " has no columns");
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    const Json& row = rows[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != c) {
      fail(ErrorKind::kDimensionMismatch, std::string(name) + " rows differ in length");
    }
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = row[j].get<double>();
  }
  return m;
}

Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vector_from_json(const Json& arr, const char* name) {
  if (!arr.is_array()) fail(ErrorKind::kInvalidArgument, std::string(name) + " must be an array");
  Vector v(static_cast<Eigen::Index>(arr.size()));
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

std::pair<int, int> parse_pair_key(const std::string& key, int s) {
  int i = 0;
  int j = 0;
  char tail = 0;
  if (std::sscanf(key.c_str(), "%d,%d%c", &i, &j, &tail) != 2 || i < 1 || j < 1 ||
      i > s || j > s || i == j) {
    fail(ErrorKind::kInvalidArgument, "bad route key '" + key + "'");
  }
  return {i - 1, j - 1};
}

Vector route_map(const Json& doc, const char* name, const IndexMap& index) {
  if (!doc.contains(name) || !doc[name].is_object()) {
    fail(ErrorKind::kInvalidArgument, std::string("scenario lacks route map '") + name + "'");
  }
  const Json& obj = doc[name];
  Vector v = Vector::Constant(index.pairs(), std::numeric_limits<double>::quiet_NaN());
  for (const auto& [key, value] : obj.items()) {
    const auto [i, j] = parse_pair_key(key, index.stations());
    v[index.index(i, j)] = value.get<double>();
  }
  for (int p = 0; p < index.pairs(); ++p) {
    if (std::isnan(v[p])) {
      const auto [i, j] = index.pair(p);
      fail(ErrorKind::kInvalidArgument,
           std::string("missing ") + name + " for route " + pair_key(i, j));
    }
  }
  return v;
}

Json route_map_to_json(const Vector& v, const IndexMap& index) {
  Json obj = Json::object();
  for (int p = 0; p < index.pairs(); ++p) {
    const auto [i, j] = index.pair(p);
    obj[pair_key(i, j)] = v[p];
  }
  return obj;
}

template <typename F>
auto guarded(F&& body) -> decltype(body()) {
  try {
    return body();
  } catch (const Json::exception& e) {
    fail(ErrorKind::kInvalidArgument, std::string("malformed JSON document: ") + e.what());
  }
}

std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace

std::string pair_key(int i, int j) {
  return std::to_string(i + 1) + "," + std::to_string(j + 1);
}

ScheduleInstance instance_from_json(const Json& doc) {
  return guarded([&] {
    if (!doc.is_object()) fail(ErrorKind::kInvalidArgument, "instance must be a JSON object");
    ScheduleInstance inst;
    inst.system.a = matrix_from_json(doc.at("A"), "A");
    inst.system.b = matrix_from_json(doc.at("B"), "B");
    inst.system.horizon = doc.at("T").get<double>();
    const int m = inst.system.input_dim();
    const Json& alpha = doc.at("alpha");
    if (alpha.is_number()) inst.alpha = Vector::Constant(m, alpha.get<double>());
    else inst.alpha = vector_from_json(alpha, "alpha");
    inst.beta = doc.at("beta").get<int>();
    inst.validate();
    return inst;
  });
}

Json instance_to_json(const ScheduleInstance& instance) {
  Json doc;
  doc["A"] = matrix_to_json(instance.system.a);
  doc["B"] = matrix_to_json(instance.system.b);
  doc["T"] = instance.system.horizon;
  doc["alpha"] = vector_to_json(instance.alpha);
  doc["beta"] = instance.beta;
  return doc;
}

MobilityScenario scenario_from_json(const Json& doc) {
  return guarded([&] {
    if (!doc.is_object()) fail(ErrorKind::kInvalidArgument, "scenario must be a JSON object");
    if (doc.contains("generate")) {
      const Json& gen = doc["generate"];
      ScenarioConfig cfg;
      cfg.total_vehicles = gen.value("total", cfg.total_vehicles);
      cfg.horizon_hours = doc.value("horizon_hours", cfg.horizon_hours);
      cfg.beta = doc.value("beta", cfg.beta);
      if (doc.contains("target")) cfg.target = parse_target_mode(doc["target"].value("mode", "equalize"));
      return generate_random_scenario(gen.at("stations").get<int>(),
                                      gen.value("seed", std::uint64_t{1}), cfg);
    }
    MobilityScenario sc;
    const Json& st = doc.at("stations");
    if (!st.is_array() || st.size() < 2) {
      fail(ErrorKind::kInvalidArgument, "scenario needs at least 2 stations");
    }
    for (const Json& e : st) {
      Station s;
      s.id = e.at("id").get<int>();
      s.x_km = e.value("x_km", 0.0);
      s.y_km = e.value("y_km", 0.0);
      s.initial = e.at("initial").get<double>();
      sc.stations.push_back(s);
    }
    const IndexMap index(static_cast<int>(sc.stations.size()));
    sc.horizon_hours = doc.at("horizon_hours").get<double>();
    sc.beta = doc.at("beta").get<int>();
    sc.gamma = route_map(doc, "gamma", index);
    sc.theta = route_map(doc, "theta", index);
    sc.lambda = route_map(doc, "lambda", index);
    sc.gbar = route_map(doc, "gbar", index);
    if (doc.contains("target")) {
      const Json& t = doc["target"];
      sc.target.mode = parse_target_mode(t.value("mode", "equalize"));
      if (t.contains("stations")) sc.target.stations = vector_from_json(t["stations"], "target.stations");
      if (t.contains("in_transit")) sc.target.in_transit = route_map(t, "in_transit", index);
    }
    sc.validate();
    return sc;
  });
}

Json scenario_to_json(const MobilityScenario& sc) {
  const IndexMap index(sc.num_stations());
  Json doc;
  Json st = Json::array();
  for (const Station& s : sc.stations) {
    st.push_back({{"id", s.id}, {"x_km", s.x_km}, {"y_km", s.y_km}, {"initial", s.initial}});
  }
  doc["stations"] = st;
  doc["horizon_hours"] = sc.horizon_hours;
  doc["beta"] = sc.beta;
  doc["gamma"] = route_map_to_json(sc.gamma, index);
  doc["theta"] = route_map_to_json(sc.theta, index);
  doc["lambda"] = route_map_to_json(sc.lambda, index);
  doc["gbar"] = route_map_to_json(sc.gbar, index);
  Json target;
  target["mode"] = to_string(sc.target.mode);
  if (sc.target.stations.size()) target["stations"] = vector_to_json(sc.target.stations);
  if (sc.target.in_transit.size()) target["in_transit"] = route_map_to_json(sc.target.in_transit, index);
  doc["target"] = target;
  return doc;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot write '" + path + "'");
  out << text;
  if (!out) fail(ErrorKind::kIo, "write failed for '" + path + "'");
}

Json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    fail(ErrorKind::kInvalidArgument, "cannot parse '" + path + "': " + e.what());
  }
}

std::string schedule_csv(const Schedule& schedule) {
  std::string out = "t";
  for (Eigen::Index j = 0; j < schedule.v.cols(); ++j) out += ",v_" + std::to_string(j + 1);
  out += '\n';
  for (Eigen::Index k = 0; k < schedule.v.rows(); ++k) {
    out += fmt(schedule.grid.knot(static_cast<int>(k)));
    for (Eigen::Index j = 0; j < schedule.v.cols(); ++j) out += "," + fmt(schedule.v(k, j));
    out += '\n';
  }
  return out;
}

Json gantt_json(const Schedule& schedule, double threshold) {
  Json channels = Json::array();
  const auto K = static_cast<int>(schedule.v.rows());
  for (Eigen::Index j = 0; j < schedule.v.cols(); ++j) {
    Json intervals = Json::array();
    int start = -1;
    for (int k = 0; k <= K; ++k) {
      const bool on = k < K && schedule.v(k, j) > threshold;
      if (on && start < 0) start = k;
      if (!on && start >= 0) {
        intervals.push_back({schedule.grid.knot(start), schedule.grid.knot(k)});
        start = -1;
      }
    }
    channels.push_back({{"channel", j + 1}, {"intervals", intervals}});
  }
  return {{"horizon", schedule.grid.horizon()}, {"channels", channels}};
}

Json census_json(const CostCensus& c) {
  return {{"L0", c.l0},
          {"L1", c.l1},
          {"l0_max", c.l0_step_max},
          {"l1_max", c.l1_step_max},
          {"L0_per_channel", vector_to_json(c.l0_channel)}};
}

Json controls_json(const ControlTrajectory& control, const IndexMap& index) {
  Json triplets = Json::array();
  for (Eigen::Index k = 0; k < control.u.rows(); ++k) {
    for (int p = 0; p < index.pairs(); ++p) {
      const double v = control.u(k, p);
      if (std::abs(v) <= 1e-12) continue;
      const auto [i, j] = index.pair(p);
      triplets.push_back({k, pair_key(i, j), v});
    }
  }
  return {{"grid", {{"steps", control.grid.steps()}, {"horizon", control.grid.horizon()}}},
          {"controls", triplets}};
}

LoadedControls controls_from_json(const Json& doc, const IndexMap& index) {
  return guarded([&] {
    const Json& g = doc.at("grid");
    LoadedControls out{TimeGrid(g.at("horizon").get<double>(), g.at("steps").get<int>()),
                       Matrix()};
    out.u = Matrix::Zero(out.grid.steps(), index.pairs());
    for (const Json& t : doc.at("controls")) {
      const int k = t.at(0).get<int>();
      const auto [i, j] = parse_pair_key(t.at(1).get<std::string>(), index.stations());
      if (k < 0 || k >= out.grid.steps()) {
        fail(ErrorKind::kInvalidArgument, "control step index out of range");
      }
      out.u(k, index.index(i, j)) = t.at(2).get<double>();
    }
    return out;
  });
}

std::string state_csv(const Matrix& states, const TimeGrid& grid) {
  std::string out = "t";
  for (Eigen::Index i = 0; i < states.rows(); ++i) out += ",x_" + std::to_string(i + 1);
  out += '\n';
  for (Eigen::Index k = 0; k < states.cols(); ++k) {
    out += fmt(grid.knot(static_cast<int>(k)));
    for (Eigen::Index i = 0; i < states.rows(); ++i) out += "," + fmt(states(i, k));
    out += '\n';
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

Json RunManifest::to_json() const {
  Json d = Json::object();
  for (const auto& [name, digest] : digests) d[name] = digest;
  return {{"command", command},   {"inputs", inputs},
          {"seed", seed},         {"grid", grid},
          {"version", version},   {"wall_clock_seconds", wall_seconds},
          {"digests", d}};
}

}  // namespace sparsectl
