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

#include <span>
#include <vector>

#include "optpop/smooth_problem.hpp"

namespace optpop {

/// Augmented Lagrangian of a SmoothProblem for fixed multipliers and penalty.
/// Equalities enter as -lam c + rho/2 c^2, inequalities c >= 0 through the
/// shifted term (max(0, z - rho c)^2 - z^2) / (2 rho).
struct MeritTerms {
  std::span<const double> eq_multipliers;
  std::span<const double> ineq_multipliers;
  double penalty = 10.0;
};

struct InnerOptions {
  int max_iterations = 500;
  double tolerance = 1e-6;  ///< on the projected-gradient infinity norm
  double armijo = 1e-4;
  int max_backtracks = 40;
  double active_margin = 0.0;
  double initial_radius = 0.5;  ///< largest step as a multiple of max(|x_i|, radius_floor)
  double radius_floor = 1e-2;
  double max_radius = 10.0;
  int model_passes = 4;  ///< active-set sweeps of the piecewise-quadratic model per step
};

struct InnerResult {
  int iterations = 0;
  int evaluations = 0;
  double value = 0.0;
  double projected_gradient = 0.0;
  bool converged = false;
  bool stalled = false;
  bool evaluation_failed = false;  ///< the starting point could not be evaluated
};

double projected_gradient_norm(std::span<const double> x, std::span<const double> g, std::span<const double> lower,
                               std::span<const double> upper);

/// Merit value at x; fills grad when it is non-empty.
double merit_value(const SmoothProblem& problem, const MeritTerms& terms, std::span<const double> x,
                   std::span<double> grad);

/// Equality multipliers minimising ||grad f - J_I^T z - J_E^T lam|| over the
/// coordinates strictly inside the box, clipped to +-1e6. An empty
/// `ineq_multipliers` means z = 0.
std::vector<double> least_squares_multipliers(const SmoothProblem& problem, std::span<const double> x,
                                              std::span<const double> ineq_multipliers = {});

/// Projected quasi-Newton on the box. The model Hessian is a dense BFGS
/// approximation of the Lagrangian part plus rho J^T J over the equality rows
/// and the inequality rows whose shifted multiplier is positive.
/// `lagrangian_hessian` is n*n row-major and carries curvature between calls;
/// pass an empty vector to start from a scaled identity.
InnerResult minimize_merit(const SmoothProblem& problem, const MeritTerms& terms, std::vector<double>& x,
                           std::vector<double>& lagrangian_hessian, const InnerOptions& options);

}  // namespace optpop
