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

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "optpop/solver.hpp"

namespace optpop {

struct SweepEntry {
  int T = 0;
  SolveReport report;
  bool warm_started = false;
  bool retried_from_flat = false;
  /// Skipped by the reserve certificate: even minimal populations overdraw R.
  bool certified_infeasible = false;
};

/// Sweep outcome. `entries` is strictly ascending in T.
struct SweepResult {
  Objective objective = Objective::Utilitarian;
  std::vector<SweepEntry> entries;
  int T_star = 0;
  double objective_at_star = 0.0;
  int T_min = 0;
  int T_max = 0;
  int step = 1;
  /// Radius of the step-1 refinement merged in, or -1 when none was.
  int refine_radius = -1;

  const SweepEntry* find(int T) const;
  const SweepEntry& star() const;
  /// Human-readable description of the horizon grid, e.g. "10:450:10 refine 10".
  std::string schedule() const;
};

struct SweepOptions {
  SolveOptions solve;
  /// Ascending warm-started sweep. When false every T starts from Flat and
  /// up to `workers` horizons are solved concurrently.
  bool warm_start = true;
  int workers = 1;
  /// Called once per finished entry, in ascending T for warm sweeps.
  std::function<void(const SweepEntry&)> on_entry;
};

/// No horizon in a sweep was solved to optimality.
class SweepError : public std::runtime_error {
 public:
  SweepError(const std::string& what, std::vector<SweepEntry> entries)
      : std::runtime_error(what), entries_(std::move(entries)) {}
  const std::vector<SweepEntry>& entries() const noexcept { return entries_; }

 private:
  std::vector<SweepEntry> entries_;
};

/// Least stock energy any admissible schedule of horizon T can use: every
/// N_t after the first at its lower bound lambda.
double minimum_resource_use(const ScenarioParams& params, int T);

/// Largest T whose minimum resource use fits in R_bar, or nullopt when every
/// horizon up to `limit` fits.
std::optional<int> max_feasible_horizon(const ScenarioParams& params, int limit = 100000);

/// Solves T = T_min, T_min + step, ..., T_max. Failed warm solves are
/// retried once from Flat. Throws ConfigError on a bad range and
/// SweepError if no entry is Optimal.
SweepResult sweep(const ScenarioParams& params, Objective objective, int T_min, int T_max, int step,
                  const SweepOptions& options);

/// Step-1 sweep on [T_star - radius, T_star + radius] warm-started from the
/// nearest coarse solution below it, merged into `coarse`. Where both have
/// an entry for T the better report is kept.
SweepResult refine(const ScenarioParams& params, const SweepResult& coarse, int radius, const SweepOptions& options);

/// Index of the best Optimal entry (highest objective, then smallest T), or
/// nullopt if there is none.
std::optional<std::size_t> best_entry(const std::vector<SweepEntry>& entries);

}  // namespace optpop
