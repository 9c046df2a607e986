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

#include "optpop_cli/result_bundle.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <limits>
#include <sstream>
#include <system_error>

#include "optpop/errors.hpp"
#include "optpop_cli/text_format.hpp"

#ifndef OPTPOP_VERSION
#define OPTPOP_VERSION "0.0.0"
#endif

namespace optpop::cli {

namespace {

const std::array<std::pair<const char*, double ScenarioFields::*>, 15> kFields = {{
    {"alpha", &ScenarioFields::alpha}, {"beta", &ScenarioFields::beta},
    {"gamma", &ScenarioFields::gamma}, {"delta", &ScenarioFields::delta},
    {"sigma", &ScenarioFields::sigma}, {"rho", &ScenarioFields::rho},
    {"theta", &ScenarioFields::theta}, {"mu", &ScenarioFields::mu},
    {"lambda_pop", &ScenarioFields::lambda_pop}, {"omega", &ScenarioFields::omega},
    {"R_bar", &ScenarioFields::R_bar}, {"k1", &ScenarioFields::k1},
    {"N1", &ScenarioFields::N1}, {"G1", &ScenarioFields::G1},
    {"H1", &ScenarioFields::H1},
}};

double column_value(const GenerationState& g, std::string_view col) {
  if (col == "t") return g.t;
  if (col == "N") return g.N;
  if (col == "n") return g.n;
  if (col == "k") return g.k;
  if (col == "A") return g.A;
  if (col == "G") return g.G;
  if (col == "H") return g.H;
  if (col == "R") return g.R;
  if (col == "w") return g.w;
  if (col == "r") return g.r_next;
  if (col == "s") return g.s;
  if (col == "c") return g.c;
  if (col == "d") return g.d_old;
  return g.u;
}

Json header(const ScenarioFile& file, std::string_view command, const std::string& timestamp) {
  Json j;
  j["tool"] = tool_name;
  j["version"] = OPTPOP_VERSION;
  j["format"] = bundle_format;
  j["timestamp"] = timestamp;
  j["command"] = command;
  j["scenario_id"] = file.id;
  j["scenario"] = scenario_json(file);
  return j;
}

std::vector<double> number_array(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) throw ConfigError(std::string("bundle: missing array '") + key + "'");
  std::vector<double> out;
  out.reserve(j.at(key).size());
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError(std::string("bundle: non-numeric entry in '") + key + "'");
    out.push_back(v.get<double>());
  }
  return out;
}

Json schedule_entry(const SweepEntry& e) {
  Json j;
  j["T"] = e.T;
  j["status"] = to_string(e.report.status);
  j["objective"] = e.report.objective;
  j["warm_started"] = e.warm_started;
  j["retried_from_flat"] = e.retried_from_flat;
  j["certified_infeasible"] = e.certified_infeasible;
  j["outer_iterations"] = e.report.outer_iterations;
  j["inner_iterations"] = e.report.inner_iterations;
  j["equality_norm"] = e.report.equality_norm;
  j["projected_gradient"] = e.report.projected_gradient;
  const auto& traj = e.report.trajectory;
  if (traj.horizon() == e.T) {
    j["N"] = traj.populations();
    std::vector<double> k;
    for (const auto& g : traj.generations) k.push_back(g.k);
    j["k"] = std::move(k);
  } else {
    j["N"] = Json::array();
    j["k"] = Json::array();
  }
  return j;
}

}  // namespace

std::string bundle_timestamp() {
  std::time_t when = 0;
  if (const char* env = std::getenv("SOURCE_DATE_EPOCH"); env && *env) {
    char* end = nullptr;
    const long long v = std::strtoll(env, &end, 10);
    if (*end != '\0' || v < 0) throw ConfigError("SOURCE_DATE_EPOCH must be a non-negative integer");
    when = static_cast<std::time_t>(v);
  } else {
    when = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&when, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json scenario_json(const ScenarioFile& file) {
  Json j;
  for (const auto& [key, member] : kFields) j[key] = file.fields.*member;
  return j;
}

ScenarioFields scenario_fields_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("bundle: 'scenario' is not an object");
  ScenarioFields f;
  for (const auto& [key, member] : kFields) {
    if (!j.contains(key) || !j.at(key).is_number()) throw ConfigError(std::string("bundle: scenario lacks '") + key + "'");
    f.*member = j.at(key).get<double>();
  }
  return f;
}

Json trajectory_series(const Trajectory& traj) {
  Json j;
  for (auto col : series_columns) {
    if (col == "t") {
      std::vector<int> t;
      for (const auto& g : traj.generations) t.push_back(g.t);
      j[std::string(col)] = std::move(t);
      continue;
    }
    std::vector<double> v;
    v.reserve(traj.generations.size());
    for (const auto& g : traj.generations) v.push_back(column_value(g, col));
    j[std::string(col)] = std::move(v);
  }
  return j;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::string out;
  for (std::size_t i = 0; i < series_columns.size(); ++i) {
    if (i) out += ',';
    out += series_columns[i];
  }
  out += '\n';
  for (const auto& g : traj.generations) {
    out += std::to_string(g.t);
    for (std::size_t i = 1; i < series_columns.size(); ++i) {
      out += ',';
      out += format_double(column_value(g, series_columns[i]));
    }
    out += '\n';
  }
  return out;
}

Trajectory trajectory_from_series(const Json& series, const ScenarioParams& params) {
  const auto N = number_array(series, "N");
  const auto k = number_array(series, "k");
  if (N.size() != k.size() || N.empty()) throw ConfigError("bundle: N and k series are empty or differ in length");
  return evaluate_schedule(N, k, params);
}

Json trajectory_summary(const Trajectory& traj, Objective objective) {
  Json j;
  if (traj.generations.empty()) {
    j["objective"] = nullptr;
    return j;
  }
  const auto w = welfare_pair(traj, objective);
  j["objective"] = objective == Objective::Utilitarian ? w.utilitarian_value : w.min_utility;
  j["utilitarian_value"] = w.utilitarian_value;
  j["min_u"] = w.min_utility;
  j["sum_N"] = cumulative_population(traj);
  j["gini"] = gini(traj);
  j["T"] = traj.horizon();
  j["terminal_reserve"] = traj.terminal_reserve;
  return j;
}

Json solve_diagnostics(const SolveReport& report) {
  Json j;
  j["status"] = to_string(report.status);
  j["message"] = report.message;
  j["epigraph_value"] = report.epigraph_value;
  j["equality_norm"] = report.equality_norm;
  j["inequality_violation"] = report.inequality_violation;
  j["projected_gradient"] = report.projected_gradient;
  j["complementarity"] = report.complementarity;
  j["outer_iterations"] = report.outer_iterations;
  j["inner_iterations"] = report.inner_iterations;
  j["start_index"] = report.start_index;
  j["start_fell_back_to_flat"] = report.start_fell_back_to_flat;
  j["accepted_feasibility"] = report.accepted_feasibility;
  Json starts = Json::array();
  for (const auto& s : report.starts) {
    Json e;
    e["index"] = s.index;
    e["status"] = to_string(s.status);
    e["objective"] = s.objective;
    e["feasibility"] = s.feasibility;
    starts.push_back(std::move(e));
  }
  j["starts"] = std::move(starts);
  return j;
}

Json solve_bundle(const ScenarioFile& file, Objective objective, int horizon, const SolveReport& report,
                  const std::string& timestamp) {
  Json j = header(file, "solve", timestamp);
  j["objective"] = to_string(objective);
  j["horizon"] = horizon;
  const bool complete = report.trajectory.horizon() == horizon;
  const Trajectory empty;
  j["summary"] = trajectory_summary(complete ? report.trajectory : empty, objective);
  j["diagnostics"] = solve_diagnostics(report);
  j["series"] = trajectory_series(complete ? report.trajectory : empty);
  return j;
}

Json sweep_bundle(const ScenarioFile& file, const SweepResult& result, const std::string& timestamp) {
  Json j = header(file, "sweep", timestamp);
  j["objective"] = to_string(result.objective);
  Json range;
  range["t_min"] = result.T_min;
  range["t_max"] = result.T_max;
  range["step"] = result.step;
  range["refine"] = result.refine_radius;
  range["schedule"] = result.schedule();
  j["range"] = std::move(range);

  const auto& star = result.star();
  Json summary = trajectory_summary(star.report.trajectory, result.objective);
  summary["T_star"] = result.T_star;
  int solved = 0;
  for (const auto& e : result.entries) solved += e.report.optimal() ? 1 : 0;
  summary["horizons"] = result.entries.size();
  summary["solved"] = solved;
  j["summary"] = std::move(summary);

  Json horizons;
  std::vector<int> Ts;
  std::vector<double> objs;
  std::vector<std::string> statuses;
  for (const auto& e : result.entries) {
    Ts.push_back(e.T);
    objs.push_back(e.report.objective);
    statuses.emplace_back(to_string(e.report.status));
  }
  horizons["T"] = std::move(Ts);
  horizons["objective"] = std::move(objs);
  horizons["status"] = std::move(statuses);
  j["horizons"] = std::move(horizons);

  j["star_diagnostics"] = solve_diagnostics(star.report);
  j["series"] = trajectory_series(star.report.trajectory);
  Json entries = Json::array();
  for (const auto& e : result.entries) entries.push_back(schedule_entry(e));
  j["entries"] = std::move(entries);
  return j;
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = "T,objective,status\n";
  for (const auto& e : result.entries) {
    out += std::to_string(e.T) + ',' + format_double(e.report.objective) + ',' + std::string(to_string(e.report.status)) +
           '\n';
  }
  return out;
}

Json steady_state_bundle(const ScenarioFile& file, const SteadyStateSeries& series, const FertilityMinimum& minimum,
                         const std::string& timestamp) {
  Json j = header(file, "steady-state", timestamp);
  Json grid;
  grid["k_min"] = file.grid.k_min;
  grid["k_max"] = file.grid.k_max;
  grid["points"] = file.grid.points;
  grid["tolerance"] = file.grid.tolerance;
  j["grid"] = std::move(grid);
  Json summary;
  summary["k_hat"] = minimum.k;
  summary["n_hat"] = minimum.n;
  summary["u_hat"] = minimum.u;
  j["summary"] = std::move(summary);
  Json s;
  s["k"] = series.k;
  s["n"] = series.n;
  s["u"] = series.u;
  j["series"] = std::move(s);
  return j;
}

std::string steady_state_csv(const SteadyStateSeries& series) {
  std::string out = "k,n,u\n";
  for (std::size_t i = 0; i < series.k.size(); ++i) {
    out += format_double(series.k[i]) + ',' + format_double(series.n[i]) + ',' + format_double(series.u[i]) + '\n';
  }
  return out;
}

Json frontier_bundle(const ScenarioFile& file, const std::vector<FrontierInput>& inputs, const FrontierSet& set,
                     const std::string& timestamp) {
  Json j = header(file, "frontier", timestamp);
  Json points = Json::array();
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& p = set.points[i];
    Json e;
    e["source"] = inputs[i].source;
    e["objective"] = to_string(p.objective);
    e["T"] = p.T;
    e["utilitarian_value"] = p.utilitarian_value;
    e["min_u"] = p.min_utility;
    e["grand_optimum"] = inputs[i].grand_optimum;
    e["dominated"] = static_cast<bool>(set.dominated[i]);
    points.push_back(std::move(e));
  }
  Json frontier = Json::array();
  for (const auto& p : set.frontier()) {
    Json e;
    e["objective"] = to_string(p.objective);
    e["T"] = p.T;
    e["utilitarian_value"] = p.utilitarian_value;
    e["min_u"] = p.min_utility;
    frontier.push_back(std::move(e));
  }
  Json summary;
  summary["points"] = inputs.size();
  summary["non_dominated"] = frontier.size();
  j["summary"] = std::move(summary);
  j["frontier"] = std::move(frontier);
  j["points"] = std::move(points);
  return j;
}

std::string frontier_csv(const std::vector<FrontierInput>& inputs, const FrontierSet& set) {
  std::string out = "T,objective,utilitarian_value,min_u,grand_optimum,dominated\n";
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const auto& p = set.points[i];
    out += std::to_string(p.T) + ',' + std::string(to_string(p.objective)) + ',' + format_double(p.utilitarian_value) +
           ',' + format_double(p.min_utility) + ',' + (inputs[i].grand_optimum ? "1" : "0") + ',' +
           (set.dominated[i] ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<FrontierInput> frontier_inputs(const Json& bundle, const ScenarioFile& file, const std::string& source) {
  if (!bundle.is_object() || bundle.value("tool", "") != tool_name) {
    throw ConfigError(source + ": not an optpop result bundle");
  }
  if (bundle.value("format", 0) != bundle_format) throw ConfigError(source + ": unsupported bundle format");
  const auto command = bundle.value("command", "");
  if (command != "sweep" && command != "solve") {
    throw ConfigError(source + ": '" + command + "' bundles carry no schedules");
  }
  const auto fields = scenario_fields_from_json(bundle.at("scenario"));
  for (const auto& [key, member] : kFields) {
    if (fields.*member != file.fields.*member) {
      throw ConfigError(source + ": scenario parameter '" + key + "' differs from the scenario file");
    }
  }
  const auto objective = parse_objective(bundle.value("objective", ""));
  if (!objective) throw ConfigError(source + ": unknown objective");
  const ScenarioParams params(file.fields);

  std::vector<FrontierInput> out;
  auto add = [&](const Json& series, bool star) {
    const auto traj = trajectory_from_series(series, params);
    FrontierInput in;
    in.point = welfare_pair(traj, *objective, file.id);
    in.source = source;
    in.grand_optimum = star;
    out.push_back(std::move(in));
  };
  try {
    if (command == "solve") {
      if (bundle.at("diagnostics").value("status", "") != "optimal") {
        throw ConfigError(source + ": solve bundle did not converge");
      }
      add(bundle.at("series"), false);
    } else {
      const int T_star = bundle.at("summary").at("T_star").get<int>();
      for (const auto& e : bundle.at("entries")) {
        if (e.value("status", "") != "optimal") continue;
        add(e, e.at("T").get<int>() == T_star);
      }
    }
  } catch (const Json::exception& e) {
    throw ConfigError(source + ": malformed bundle (" + e.what() + ")");
  } catch (const DomainError& e) {
    throw ConfigError(source + ": stored schedule is invalid (" + e.what() + ")");
  }
  if (out.empty()) throw ConfigError(source + ": no converged schedules");
  return out;
}

std::string dump_bundle(const Json& bundle) { return bundle.dump(2) + "\n"; }

Json read_bundle(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open bundle " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError(path.string() + ": invalid JSON (" + e.what() + ")");
  }
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
    if (ec) throw ConfigError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  }
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out.flush()) throw ConfigError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot rename into " + path.string());
  }
}

}  // namespace optpop::cli
