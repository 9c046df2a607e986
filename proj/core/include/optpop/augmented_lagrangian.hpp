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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optpop/smooth_problem.hpp"

namespace optpop {

struct SolveOptions {
  int max_outer_iterations = 60;
  int max_inner_iterations = 500;
  double initial_penalty = 10.0;
  double penalty_growth = 10.0;
  double penalty_cap = 1e8;
  double equality_tolerance = 1e-8;
  double stationarity_tolerance = 1e-6;
  int multistart_count = 4;
  std::uint64_t seed = 20260115;
  int workers = 1;  ///< threads used by multistart; 1 runs starts in order

  /// Throws ConfigError unless every count and tolerance is positive and
  /// tolerances are below 1.
  void validate() const;
};

enum class SolveStatus { Optimal, Infeasible, IterationLimit, EvaluationError };

std::string_view to_string(SolveStatus status);

struct KktResiduals {
  double stationarity = 0.0;     ///< || P(x - grad L) - x ||_inf
  double feasibility = 0.0;      ///< max(|c_E|, max(0, -c_I)), infinity norm
  double complementarity = 0.0;  ///< max_j |z_j c_I,j|
};

/// First-order optimality measures for min f s.t. c_E = 0, c_I >= 0 with
/// Lagrangian f - eq_mult . c_E - ineq_mult . c_I.
KktResiduals kkt_residuals(const SmoothProblem& problem, std::span<const double> x,
                           std::span<const double> eq_multipliers, std::span<const double> ineq_multipliers);

struct AlResult {
  SolveStatus status = SolveStatus::IterationLimit;
  std::vector<double> x;
  std::vector<double> eq_multipliers;
  std::vector<double> ineq_multipliers;
  double objective = 0.0;  ///< f(x), minimisation sense
  double equality_norm = 0.0;
  double inequality_violation = 0.0;
  double projected_gradient = 0.0;
  double complementarity = 0.0;
  double penalty = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  /// Feasibility measure at each outer iteration that updated multipliers.
  std::vector<double> accepted_feasibility;
  std::string message;
};

/// Bound-constrained augmented Lagrangian (PHR form). Equalities enter
/// through multiplier-shifted quadratic penalties, inequalities through
/// max(0, z - rho c)^2 terms; each subproblem is solved over the box by
/// minimize_merit. Multipliers are updated only when feasibility beats
/// the current target, otherwise the penalty grows.
AlResult augmented_lagrangian(const SmoothProblem& problem, std::vector<double> x0, const SolveOptions& options);

}  // namespace optpop
