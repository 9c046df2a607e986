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

#include <string>
#include <vector>

#include "optpop/augmented_lagrangian.hpp"
#include "optpop/nlp_transcription.hpp"
#include "optpop/olg_model.hpp"

namespace optpop {

struct StartSummary {
  int index = 0;
  SolveStatus status = SolveStatus::IterationLimit;
  double objective = 0.0;
  double feasibility = 0.0;
};

/// Outcome of solving one fixed-horizon planning problem.
struct SolveReport {
  SolveStatus status = SolveStatus::IterationLimit;
  /// Welfare re-evaluated on `trajectory`: sum u_t N_t, or min_t u_t.
  double objective = 0.0;
  /// Value of the u_min decision variable (Maximin); equals `objective`
  /// for Utilitarian.
  double epigraph_value = 0.0;
  double equality_norm = 0.0;
  double inequality_violation = 0.0;
  double projected_gradient = 0.0;
  double complementarity = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  int start_index = 0;
  bool start_fell_back_to_flat = false;
  std::vector<double> x;
  std::vector<double> eq_multipliers;
  std::vector<double> ineq_multipliers;
  std::vector<double> accepted_feasibility;
  Trajectory trajectory;
  std::vector<StartSummary> starts;
  std::string message;

  bool optimal() const noexcept { return status == SolveStatus::Optimal; }
  double feasibility() const noexcept { return std::max(equality_norm, inequality_violation); }
};

/// Runs the augmented-Lagrangian solver from `x0`.
SolveReport solve_from(const NlpProblem& problem, std::vector<double> x0, const SolveOptions& options);

/// Solves from the Flat guess plus `multistart_count - 1` seeded
/// log-uniform perturbations of it. The best Optimal run wins (highest
/// welfare, then lower feasibility norm, then lower start index); if none
/// is Optimal the most nearly feasible run is returned.
SolveReport multistart(const NlpProblem& problem, const SolveOptions& options);

/// Same as multistart.
SolveReport solve(const NlpProblem& problem, const SolveOptions& options);

/// Start `index` of the multistart family (0 is Flat).
std::vector<double> multistart_point(const NlpProblem& problem, int index, std::uint64_t seed);

}  // namespace optpop
