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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "optpop/augmented_lagrangian.hpp"
#include "optpop/scenario.hpp"
#include "optpop/steady_state.hpp"

namespace optpop::cli {

struct SweepRange {
  int t_min = 10;
  int t_max = 160;
  int step = 1;
  int refine = -1;  ///< -1: no refinement
};

/// Parsed scenario document.
///
///   id = "a"
///   alpha = 0.3          # every ScenarioFields key is required
///   ...
///   [solver]             # optional, SolveOptions overrides
///   [sweep]              # optional: t_min, t_max, step, refine
///   [steady_state]       # optional: k_min, k_max, points, tolerance
struct ScenarioFile {
  std::string id;
  ScenarioFields fields;
  SolveOptions solver;
  std::optional<SweepRange> sweep;
  SteadyStateGrid grid;

  ScenarioParams params() const { return ScenarioParams(fields); }
};

/// Throws ConfigError naming the line and key on any syntax error,
/// duplicate or unknown key; missing keys are reported together.
ScenarioFile parse_scenario(std::string_view text, const std::string& origin = "<string>");
ScenarioFile load_scenario(const std::filesystem::path& path);

/// Canonical text form; parse_scenario(format_scenario(f)) == f.
std::string format_scenario(const ScenarioFile& file);

}  // namespace optpop::cli
