// Copyright 2026 The optpop Authors
//
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

#include "optpop_cli/commands.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>

#include "optpop/analysis.hpp"
#include "optpop/errors.hpp"
#include "optpop/horizon_search.hpp"
#include "optpop/solver.hpp"
#include "optpop/steady_state.hpp"
#include "optpop/validation.hpp"
#include "optpop_cli/result_bundle.hpp"
#include "optpop_cli/scenario_file.hpp"

namespace optpop::cli {

namespace fs = std::filesystem;

namespace {

struct Common {
  std::string scenario;
  std::string out_dir;
  bool quiet = false;
};

struct SolveArgs {
  std::string objective = "utilitarian";
  int horizon = 0;
  std::string derivatives = "analytic";
  std::optional<std::uint64_t> seed;
  std::optional<int> multistart;
  std::optional<int> workers;
};

struct SweepArgs {
  std::string objective = "utilitarian";
  std::optional<int> t_min, t_max, step, refine, workers;
};

struct FrontierArgs {
  std::vector<std::string> from;
};

struct ValidateArgs {
  std::uint64_t seed = ValidationOptions{}.seed;
};

fs::path output_dir(const Common& c) {
  if (!c.out_dir.empty()) return c.out_dir;
  if (const char* env = std::getenv("OPTPOP_OUTPUT_DIR"); env && *env) return env;
  return fs::current_path();
}

Objective objective_arg(const std::string& name) {
  const auto o = parse_objective(name);
  if (!o) throw ConfigError("unknown objective '" + name + "' (expected utilitarian or maximin)");
  return *o;
}

void write_pair(const fs::path& stem, const Json& bundle, const std::string& csv, std::ostream& out) {
  fs::path json_path = stem;
  json_path += ".json";
  fs::path csv_path = stem;
  csv_path += ".csv";
  write_atomic(json_path, dump_bundle(bundle));
  write_atomic(csv_path, csv);
  out << "wrote " << json_path.string() << "\nwrote " << csv_path.string() << '\n';
}

void print_summary(const Json& summary, std::ostream& out) {
  for (const auto& [key, value] : summary.items()) out << std::left << std::setw(18) << key << value.dump() << '\n';
}

int cmd_steady_state(const Common& c, std::ostream& out) {
  const auto file = load_scenario(c.scenario);
  const auto params = file.params();
  const auto series = steady_state_series(params, file.grid);
  const auto minimum = find_min_utility_fertility(params, file.grid);
  const auto bundle = steady_state_bundle(file, series, minimum, bundle_timestamp());
  if (!c.quiet) print_summary(bundle.at("summary"), out);
  write_pair(output_dir(c) / (file.id + "-steady-state"), bundle, steady_state_csv(series), out);
  return kSuccess;
}

int cmd_solve(const Common& c, const SolveArgs& a, std::ostream& out, std::ostream& err) {
  const auto file = load_scenario(c.scenario);
  const auto objective = objective_arg(a.objective);
  if (a.horizon < 2) throw ConfigError("--horizon must be at least 2");
  DerivativeMode mode = DerivativeMode::Analytic;
  if (a.derivatives == "central") mode = DerivativeMode::CentralDifference;
  else if (a.derivatives != "analytic") throw ConfigError("--derivatives must be analytic or central");

  auto options = file.solver;
  if (a.seed) options.seed = *a.seed;
  if (a.multistart) options.multistart_count = *a.multistart;
  if (a.workers) options.workers = *a.workers;
  options.validate();

  const auto problem = build_problem(file.params(), a.horizon, objective, mode);
  const auto report = solve(problem, options);
  const auto bundle = solve_bundle(file, objective, a.horizon, report, bundle_timestamp());
  const auto stem = output_dir(c) / (file.id + "-solve-" + std::string(to_string(objective)) + "-T" +
                                     std::to_string(a.horizon));
  if (!c.quiet) {
    out << std::left << std::setw(18) << "status" << to_string(report.status) << '\n';
    if (report.trajectory.horizon() == a.horizon) print_summary(bundle.at("summary"), out);
  }
  write_pair(stem, bundle, trajectory_csv(report.trajectory), out);
  if (!report.optimal()) {
    err << "solve did not converge: " << report.message << " (equality norm " << report.equality_norm
        << ", projected gradient " << report.projected_gradient << ")\n";
    return kNumericalFailure;
  }
  return kSuccess;
}

int cmd_sweep(const Common& c, const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const auto file = load_scenario(c.scenario);
  const auto objective = objective_arg(a.objective);
  SweepRange range = file.sweep.value_or(SweepRange{});
  if (a.t_min) range.t_min = *a.t_min;
  if (a.t_max) range.t_max = *a.t_max;
  if (a.step) range.step = *a.step;
  if (a.refine) range.refine = *a.refine;

  SweepOptions opts;
  opts.solve = file.solver;
  opts.workers = a.workers.value_or(1);
  if (opts.workers < 1) throw ConfigError("--workers must be at least 1");
  opts.warm_start = opts.workers == 1;
  if (!c.quiet) {
    opts.on_entry = [&err](const SweepEntry& e) {
      err << "T=" << e.T << ' ' << to_string(e.report.status) << ' ' << std::setprecision(10) << e.report.objective
          << '\n';
    };
  }

  SweepResult result;
  try {
    result = sweep(file.params(), objective, range.t_min, range.t_max, range.step, opts);
    if (range.refine >= 0) result = refine(file.params(), result, range.refine, opts);
  } catch (const SweepError& e) {
    err << "sweep failed: " << e.what() << '\n';
    return kNumericalFailure;
  }
  const auto bundle = sweep_bundle(file, result, bundle_timestamp());
  const auto stem = output_dir(c) / (file.id + "-sweep-" + std::string(to_string(objective)));
  if (!c.quiet) print_summary(bundle.at("summary"), out);
  write_pair(stem, bundle, sweep_csv(result), out);
  fs::path star = stem;
  star += "-star.csv";
  write_atomic(star, trajectory_csv(result.star().report.trajectory));
  out << "wrote " << star.string() << '\n';
  return kSuccess;
}

int cmd_frontier(const Common& c, const FrontierArgs& a, std::ostream& out) {
  const auto file = load_scenario(c.scenario);
  std::vector<FrontierInput> inputs;
  bool seen[2] = {false, false};
  for (const auto& path : a.from) {
    const auto bundle = read_bundle(path);
    auto more = frontier_inputs(bundle, file, path);
    seen[more.front().point.objective == Objective::Utilitarian ? 0 : 1] = true;
    inputs.insert(inputs.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  }
  if (!seen[0] || !seen[1]) throw ConfigError("frontier needs at least one utilitarian and one maximin bundle");

  std::vector<WelfarePoint> points;
  for (const auto& in : inputs) points.push_back(in.point);
  const auto set = build_frontier(points);
  const auto bundle = frontier_bundle(file, inputs, set, bundle_timestamp());
  if (!c.quiet) {
    print_summary(bundle.at("summary"), out);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (!inputs[i].grand_optimum) continue;
      const auto& p = set.points[i];
      out << "grand optimum " << to_string(p.objective) << " T=" << p.T << " (" << std::setprecision(8)
          << p.utilitarian_value << ", " << p.min_utility << ") " << (set.dominated[i] ? "dominated" : "non-dominated")
          << '\n';
    }
  }
  write_pair(output_dir(c) / (file.id + "-frontier"), bundle, frontier_csv(inputs, set), out);
  return kSuccess;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out) {
  ValidationOptions opts;
  opts.seed = a.seed;
  const auto results = run_validation_suite(opts);
  std::size_t width = 5;
  for (const auto& r : results) width = std::max(width, r.name.size());
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    out << std::left << std::setw(static_cast<int>(width) + 2) << r.name << (r.passed ? "PASS  " : "FAIL  ")
        << std::scientific << std::setprecision(3) << r.measured << " (tol " << r.tolerance << ")" << std::defaultfloat;
    if (!r.detail.empty()) out << "  " << r.detail;
    out << '\n';
  }
  out << (ok ? "all checks passed\n" : "validation FAILED\n");
  return ok ? kSuccess : kValidationFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Optimal population planning for an overlapping-generations economy with finite stock energy",
               "optpop"};
  app.require_subcommand(1);
  Common common;
  SolveArgs solve_args;
  SweepArgs sweep_args;
  FrontierArgs frontier_args;
  ValidateArgs validate_args;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario", common.scenario, "scenario file")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", common.out_dir, "output directory (default $OPTPOP_OUTPUT_DIR or .)");
    sub->add_flag("--quiet", common.quiet, "suppress summaries and progress");
  };

  auto* steady = app.add_subcommand("steady-state", "utility dip of the constant-productivity steady state");
  add_common(steady);

  auto* solve = app.add_subcommand("solve", "solve one fixed-horizon plan");
  add_common(solve);
  solve->add_option("--objective", solve_args.objective, "utilitarian or maximin");
  solve->add_option("--horizon,-T", solve_args.horizon, "number of generations")->required();
  solve->add_option("--derivatives", solve_args.derivatives, "analytic or central");
  solve->add_option("--seed", solve_args.seed, "multistart seed");
  solve->add_option("--multistart", solve_args.multistart, "number of starting points");
  solve->add_option("--workers", solve_args.workers, "threads for multistart");

  auto* sweep_cmd = app.add_subcommand("sweep", "solve a range of horizons and locate the best one");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--objective", sweep_args.objective, "utilitarian or maximin");
  sweep_cmd->add_option("--t-min", sweep_args.t_min, "first horizon");
  sweep_cmd->add_option("--t-max", sweep_args.t_max, "last horizon");
  sweep_cmd->add_option("--step", sweep_args.step, "horizon stride");
  sweep_cmd->add_option("--refine", sweep_args.refine, "step-1 radius around the coarse optimum");
  sweep_cmd->add_option("--workers", sweep_args.workers, "parallel cold-started horizons (1 keeps warm starts)");

  auto* frontier = app.add_subcommand("frontier", "welfare possibility frontier from stored schedules");
  add_common(frontier);
  frontier->add_option("--from", frontier_args.from, "sweep or solve bundles")->required()->expected(1, -1);

  auto* validate = app.add_subcommand("validate", "run the numerical self-checks");
  validate->add_option("--seed", validate_args.seed, "random seed");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kConfigError;
  }

  try {
    if (steady->parsed()) return cmd_steady_state(common, out);
    if (solve->parsed()) return cmd_solve(common, solve_args, out, err);
    if (sweep_cmd->parsed()) return cmd_sweep(common, sweep_args, out, err);
    if (frontier->parsed()) return cmd_frontier(common, frontier_args, out);
    if (validate->parsed()) return cmd_validate(validate_args, out);
  } catch (const ConfigError& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::runtime_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace optpop::cli
