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

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "sparsectl/error.hpp"
#include "sparsectl/io.hpp"
#include "sparsectl/mobility.hpp"
#include "sparsectl/rebalance.hpp"
#include "sparsectl/scheduling.hpp"
#include "sparsectl/stochastic.hpp"

namespace fs = std::filesystem;
using namespace sparsectl;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInput = 2;
constexpr int kExitNonBinary = 3;
constexpr int kExitInfeasible = 4;
constexpr int kExitFlags = 5;

std::string default_out() {
  const char* env = std::getenv("SPARSECTL_OUT");
  return env != nullptr && *env != '\0' ? env : ".";
}

// Collects output files so the manifest can list their digests.
class Outputs {
 public:
  Outputs(std::string dir, std::string command)
      : dir_(std::move(dir)), start_(std::chrono::steady_clock::now()) {
    manifest_.command = std::move(command);
    manifest_.version = SPARSECTL_VERSION;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) fail(ErrorKind::kIo, "cannot create output directory '" + dir_ + "'");
  }

  RunManifest& manifest() { return manifest_; }

  void write(const std::string& name, const std::string& text) {
    write_text_file((fs::path(dir_) / name).string(), text);
    manifest_.digests[name] = hex64(fnv1a64(text));
  }
  void write(const std::string& name, const Json& doc) { write(name, doc.dump(2) + "\n"); }

  void finish() {
    manifest_.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    write_text_file((fs::path(dir_) / "manifest.json").string(),
                    manifest_.to_json().dump(2) + "\n");
  }

 private:
  std::string dir_;
  RunManifest manifest_;
  std::chrono::steady_clock::time_point start_;
};

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kDimensionMismatch:
    case ErrorKind::kIo:
      return kExitInput;
    case ErrorKind::kNonBinary:
    case ErrorKind::kTerminalDrift:
      return kExitNonBinary;
    default:
      return kExitFailure;
  }
}

struct ScheduleArgs {
  std::string instance;
  int grid = 400;
  std::optional<double> baseline;
  std::string out = default_out();
};

int cmd_schedule(const ScheduleArgs& a) {
  const ScheduleInstance inst = instance_from_json(read_json_file(a.instance));
  Outputs out(a.out, "schedule");
  out.manifest().inputs = {a.instance};
  out.manifest().grid = {{"steps", a.grid}, {"horizon", inst.system.horizon}};
  const TimeGrid grid(inst.system.horizon, a.grid);
  const ScoreTable scores = controllability_scores(inst, grid);
  const RegularityReport reg = check_regularity(scores);
  const Schedule relaxed = solve_relaxed_schedule(scores, inst.alpha, inst.beta);

  Json report;
  report["relaxed_objective"] = relaxed.objective;
  report["discreteness"] = relaxed.discreteness;
  report["regular"] = reg.pass();
  report["usage"] = std::vector<double>(relaxed.usage.data(),
                                        relaxed.usage.data() + relaxed.usage.size());
  std::optional<Schedule> baseline;
  if (a.baseline) {
    baseline = top_slice_schedule(scores, *a.baseline);
    report["baseline_alpha_total"] = *a.baseline;
    report["baseline_objective"] = baseline->objective;
    out.write("baseline_schedule.csv", schedule_csv(*baseline));
  }

  Schedule binary = relaxed;
  try {
    binary = recover_binary_schedule(relaxed, scores);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonBinary) throw;
    report["status"] = "non-binary";
    out.write("schedule.csv", schedule_csv(relaxed));
    out.write("report.json", report);
    out.finish();
    std::cerr << "NON-BINARY: " << e.what() << "\n";
    return kExitNonBinary;
  }
  report["status"] = "ok";
  report["objective"] = binary.objective;
  out.write("schedule.csv", schedule_csv(binary));
  out.write("gantt.json", gantt_json(binary));
  out.write("report.json", report);
  out.finish();

  std::cout << "objective " << binary.objective << "  discreteness " << relaxed.discreteness;
  if (baseline) std::cout << "  baseline " << baseline->objective;
  std::cout << "\n";
  return kExitOk;
}

struct RebalanceArgs {
  std::string scenario;
  int grid = 96;
  bool signed_mode = false;
  bool baseline = false;
  int trials = 64;
  std::uint64_t seed = 1;
  std::string out = default_out();
};

Json assumption_json(const AssumptionReport& r) {
  Json flags = Json::array();
  for (const AssumptionFlag& f : r.flags) {
    flags.push_back({{"trial", f.trial}, {"kind", f.kind}, {"i", f.i + 1},
                     {"j", f.j >= 0 ? f.j + 1 : 0}, {"run", f.run}});
  }
  return {{"trials", r.trials},
          {"pass", r.pass()},
          {"longest_run", r.longest_run},
          {"min_gap_eta", r.min_gap_eta},
          {"min_gap_pair", r.min_gap_pair},
          {"flags", flags}};
}

int cmd_rebalance(const RebalanceArgs& a) {
  const MobilityScenario sc = scenario_from_json(read_json_file(a.scenario));
  const MobilityModel model = build_model(sc);
  Outputs out(a.out, "rebalance");
  out.manifest().inputs = {a.scenario};
  out.manifest().seed = a.seed;
  out.manifest().grid = {{"steps", a.grid}, {"horizon", sc.horizon_hours}};
  const TimeGrid grid(sc.horizon_hours, a.grid);
  const RebalanceInstance inst = make_rebalance_instance(
      model, a.signed_mode ? BoundsMode::kSigned : BoundsMode::kNonNegative);
  const ReachabilityDiscretization disc = discretize_reachability(inst.system, grid);
  const RebalanceResult res = solve_relaxed_rebalance(inst, disc);

  const AssumptionReport assumption = check_assumption(inst.system, grid, a.trials, a.seed);
  out.write("assumption.json", assumption_json(assumption));

  Json results;
  results["status"] = to_string(res.status);
  results["bounds"] = a.signed_mode ? "signed" : "nonnegative";
  if (res.status == LpStatus::kInfeasible) {
    results["unreachable_mass"] = res.mass_gap;
    out.write("controls.json", results);
    out.finish();
    std::cerr << "INFEASIBLE: target unreachable; unreachable mass (1'xd - 1'x0) = "
              << res.mass_gap << "\n";
    if (std::abs(res.mass_gap) <= 1e-9 * std::max(1.0, sc.fleet())) {
      std::cerr << "mass balances, so the control bounds or the horizon are too "
                   "tight for this target\n";
    }
    return kExitInfeasible;
  }
  if (!res.lp.optimal()) {
    out.write("controls.json", results);
    out.finish();
    std::cerr << "LP stopped: " << to_string(res.status) << "\n";
    return kExitFailure;
  }

  int code = kExitOk;
  ControlTrajectory control = res.control;
  try {
    control = extract_sparse_control(res.control, inst, disc);
    results["binary"] = true;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kNonBinary && e.kind() != ErrorKind::kTerminalDrift) throw;
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    results["binary"] = false;
    results["error"] = to_string(e.kind());
    code = kExitNonBinary;
  }
  results["costs"] = census_json(control.census);
  results["terminal_residual"] = control.terminal_residual;
  results["interior_fraction"] = control.interior_fraction;
  results["relaxed_L1"] = res.control.census.l1;
  const Json controls = controls_json(control, model.index);
  results["grid"] = controls["grid"];
  results["controls"] = controls["controls"];
  out.write("controls.json", results);
  out.write("states.csv", state_csv(propagate_state(disc.maps, inst.x0, control.u), grid));

  if (a.baseline) {
    Json b;
    try {
      const BaselineResult base = min_energy_baseline(inst, disc);
      b["costs"] = census_json(base.control.census);
      b["terminal_residual_unclipped"] = base.residual_unclipped;
      b["terminal_residual_clipped"] = base.control.terminal_residual;
      b["support_fraction"] = base.support_fraction;
      b["clipped_cells"] = base.clipped_cells;
      b["L0_ratio"] = base.control.census.l0 > 0
                          ? control.census.l0 / base.control.census.l0 : 0.0;
      std::cout << "baseline L0 " << base.control.census.l0 << "\n";
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kRankDeficient) throw;
      b["error"] = e.what();
      std::cerr << "baseline skipped: " << e.what() << "\n";
    }
    out.write("baseline.json", b);
  }
  out.finish();
  std::cout << "status " << to_string(res.status) << "  L0 " << control.census.l0
            << "  L1 " << control.census.l1 << "  residual " << control.terminal_residual
            << "  assumption " << (assumption.pass() ? "pass" : "flagged") << "\n";
  return code;
}

struct SimulateArgs {
  std::string scenario;
  std::string controls;
  int runs = 200;
  double delta = 0.0;
  std::uint64_t seed = 1;
  std::string rates = "pricing";
  double z_threshold = 5.0;
  std::string out = default_out();
};

int cmd_simulate(const SimulateArgs& a) {
  SimulationInput input;
  input.scenario = scenario_from_json(read_json_file(a.scenario));
  const IndexMap index(input.scenario.num_stations());
  if (a.rates == "pricing") input.source = RateSource::kPricing;
  else if (a.rates == "base") input.source = RateSource::kBase;
  else fail(ErrorKind::kInvalidArgument, "--rates must be 'pricing' or 'base'");
  Outputs out(a.out, "simulate");
  out.manifest().inputs = {a.scenario};
  if (!a.controls.empty()) {
    const LoadedControls lc = controls_from_json(read_json_file(a.controls), index);
    input.u = lc.u;
    input.u_grid = lc.grid;
    out.manifest().inputs.push_back(a.controls);
  }
  SimulationConfig cfg;
  cfg.runs = a.runs;
  cfg.seed = a.seed;
  cfg.z_threshold = a.z_threshold;
  cfg.delta = a.delta > 0.0 ? a.delta : input.scenario.horizon_hours / 400.0;
  out.manifest().seed = a.seed;
  out.manifest().grid = {{"delta", cfg.delta}, {"horizon", input.scenario.horizon_hours},
                         {"runs", a.runs}};
  const MonteCarloSummary sum = run_monte_carlo(input, cfg);
  std::ostringstream csv;
  write_summary_csv(sum, csv);
  out.write("summary.csv", csv.str());
  const bool pass = sum.consistent(a.z_threshold);
  out.write("verdict.json", Json{{"pass", pass},
                                 {"max_abs_z", sum.max_abs_z},
                                 {"z_threshold", a.z_threshold},
                                 {"rms_deviation", sum.rms_deviation},
                                 {"truncated_departures", sum.stats.truncated},
                                 {"clamped_demand", sum.stats.clamped_demand},
                                 {"clamped_control", sum.stats.clamped_control},
                                 {"large_rate_warning", sum.stats.large_rate}});
  out.finish();
  std::cout << (pass ? "PASS" : "FAIL") << "  max|z| " << sum.max_abs_z
            << "  truncated " << sum.stats.truncated << "  clamped demand "
            << sum.stats.clamped_demand << "\n";
  return pass ? kExitOk : kExitFlags;
}

struct GenArgs {
  int stations = 10;
  std::uint64_t seed = 1;
  double total = 200.0;
  std::string target = "equalize";
  std::string out = default_out();
};

int cmd_gen(const GenArgs& a) {
  ScenarioConfig cfg;
  cfg.total_vehicles = a.total;
  cfg.target = parse_target_mode(a.target);
  const MobilityScenario sc = generate_random_scenario(a.stations, a.seed, cfg);
  Outputs out(a.out, "gen-scenario");
  out.manifest().seed = a.seed;
  out.write("scenario.json", scenario_to_json(sc));
  out.finish();
  std::cout << "wrote " << (fs::path(a.out) / "scenario.json").string() << "\n";
  return kExitOk;
}

struct VerifyArgs {
  std::string file;
  int grid = 0;
  int trials = 64;
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

int cmd_verify(const VerifyArgs& a) {
  const Json doc = read_json_file(a.file);
  if (doc.is_object() && doc.contains("A")) {
    const ScheduleInstance inst = instance_from_json(doc);
    const ScoreTable scores =
        controllability_scores(inst, TimeGrid(inst.system.horizon, a.grid > 0 ? a.grid : 400));
    const RegularityReport r = check_regularity(scores, a.tol);
    for (int j : r.constant_channels) std::cout << "CONSTANT channel " << j + 1 << "\n";
    for (const auto& [i, j] : r.constant_pairs) {
      std::cout << "CONSTANT difference " << i + 1 << "-" << j + 1 << "\n";
    }
    std::cout << (r.pass() ? "regularity pass" : "regularity flagged") << "\n";
    return r.pass() ? kExitOk : kExitFlags;
  }
  const MobilityScenario sc = scenario_from_json(doc);
  const MobilityModel model = build_model(sc);
  const TimeGrid grid(sc.horizon_hours, a.grid > 0 ? a.grid : 96);
  const AssumptionReport r = check_assumption(model.system, grid, a.trials, a.seed, a.tol);
  for (const AssumptionFlag& f : r.flags) {
    std::cout << "FLAG trial " << f.trial << " " << f.kind << " " << f.i + 1;
    if (f.j >= 0) std::cout << "," << f.j + 1;
    std::cout << " run " << f.run << "\n";
  }
  const Demand d = effective_demand(sc, model.index, sc.initial_state());
  if (d.negative > 0) {
    std::cout << "note: " << d.negative << " routes have negative effective demand at t=0\n";
  }
  std::cout << (r.pass() ? "assumption pass" : "assumption flagged") << " (" << r.trials
            << " trials)\n";
  return r.pass() ? kExitOk : kExitFlags;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse control-node scheduling and vehicle rebalancing"};
  app.set_version_flag("--version", SPARSECTL_VERSION);
  app.require_subcommand(1);

  ScheduleArgs sa;
  auto* sched = app.add_subcommand("schedule", "solve the node-scheduling relaxation");
  sched->add_option("instance", sa.instance, "instance JSON")->required();
  sched->add_option("--grid", sa.grid, "grid steps K")->check(CLI::PositiveNumber);
  sched->add_option("--baseline", sa.baseline, "also run the top-slice schedule with this total budget");
  sched->add_option("--out", sa.out, "output directory");

  RebalanceArgs ra;
  auto* reb = app.add_subcommand("rebalance", "solve the sparse rebalancing relaxation");
  reb->add_option("scenario", ra.scenario, "scenario JSON")->required();
  reb->add_option("--grid", ra.grid, "grid steps K")->check(CLI::PositiveNumber);
  reb->add_flag("--signed", ra.signed_mode, "controls in [-1, 1]");
  reb->add_flag("--baseline", ra.baseline, "add the minimum-energy comparison");
  reb->add_option("--trials", ra.trials, "random directions for the assumption check");
  reb->add_option("--seed", ra.seed, "seed for the assumption check");
  reb->add_option("--out", ra.out, "output directory");

  SimulateArgs ma;
  auto* sim = app.add_subcommand("simulate", "Monte-Carlo check against the mean-field ODE");
  sim->add_option("scenario", ma.scenario, "scenario JSON")->required();
  sim->add_option("--controls", ma.controls, "controls JSON written by rebalance");
  sim->add_option("--runs", ma.runs, "independent runs")->check(CLI::PositiveNumber);
  sim->add_option("--delta", ma.delta, "step length in hours (default T/400)");
  sim->add_option("--seed", ma.seed, "master seed");
  sim->add_option("--rates", ma.rates, "demand model: pricing or base");
  sim->add_option("--z-threshold", ma.z_threshold, "largest accepted |z|");
  sim->add_option("--out", ma.out, "output directory");

  GenArgs ga;
  auto* gen = app.add_subcommand("gen-scenario", "draw a random station network");
  gen->add_option("--stations", ga.stations, "number of stations")->check(CLI::Range(2, 1000));
  gen->add_option("--seed", ga.seed, "seed");
  gen->add_option("--total", ga.total, "fleet size");
  gen->add_option("--target", ga.target, "equalize, stations or full");
  gen->add_option("--out", ga.out, "output directory");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "check regularity (instance) or the sampling assumption (scenario)");
  ver->add_option("file", va.file, "instance or scenario JSON")->required();
  ver->add_option("--grid", va.grid, "grid steps K");
  ver->add_option("--trials", va.trials, "random directions");
  ver->add_option("--seed", va.seed, "seed");
  ver->add_option("--tol", va.tol, "gap tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (*sched) return cmd_schedule(sa);
    if (*reb) return cmd_rebalance(ra);
    if (*sim) return cmd_simulate(ma);
    if (*gen) return cmd_gen(ga);
    if (*ver) return cmd_verify(va);
  } catch (const Error& e) {
    std::cerr << to_string(e.kind()) << ": " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
