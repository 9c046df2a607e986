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

#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "optpop/analysis.hpp"
#include "optpop/horizon_search.hpp"
#include "optpop/solver.hpp"
#include "optpop/steady_state.hpp"
#include "optpop_cli/scenario_file.hpp"

namespace optpop::cli {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view tool_name = "optpop";
inline constexpr int bundle_format = 1;

/// Per-generation columns, in CSV and bundle order. `r` is the return on
/// savings carried into the next period and `d` old-age consumption.
inline constexpr std::array<std::string_view, 14> series_columns = {"t", "N", "n", "k", "A", "G", "H",
                                                                    "R", "w", "r", "s", "c", "d", "u"};

/// UTC ISO-8601. Honours SOURCE_DATE_EPOCH so rebuilt bundles can be
/// byte-compared.
std::string bundle_timestamp();

Json scenario_json(const ScenarioFile& file);
ScenarioFields scenario_fields_from_json(const Json& j);

Json trajectory_series(const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);

/// Rebuilds every derived column from the stored N and k columns.
Trajectory trajectory_from_series(const Json& series, const ScenarioParams& params);

/// objective, min_u, sum_N, gini, T, terminal_reserve.
Json trajectory_summary(const Trajectory& traj, Objective objective);
Json solve_diagnostics(const SolveReport& report);

Json solve_bundle(const ScenarioFile& file, Objective objective, int horizon, const SolveReport& report,
                  const std::string& timestamp);

Json sweep_bundle(const ScenarioFile& file, const SweepResult& result, const std::string& timestamp);
/// T, status, objective per sweep entry.
std::string sweep_csv(const SweepResult& result);

Json steady_state_bundle(const ScenarioFile& file, const SteadyStateSeries& series, const FertilityMinimum& minimum,
                         const std::string& timestamp);
std::string steady_state_csv(const SteadyStateSeries& series);

/// One welfare point per stored schedule, tagged with its origin.
struct FrontierInput {
  WelfarePoint point;
  std::string source;
  bool grand_optimum = false;
};

Json frontier_bundle(const ScenarioFile& file, const std::vector<FrontierInput>& inputs, const FrontierSet& set,
                     const std::string& timestamp);
std::string frontier_csv(const std::vector<FrontierInput>& inputs, const FrontierSet& set);

/// Reads the schedules stored in a solve or sweep bundle and evaluates them
/// under both criteria. Throws ConfigError if the bundle is unreadable or
/// was produced for different scenario parameters.
std::vector<FrontierInput> frontier_inputs(const Json& bundle, const ScenarioFile& file, const std::string& source);

std::string dump_bundle(const Json& bundle);
Json read_bundle(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace optpop::cli
