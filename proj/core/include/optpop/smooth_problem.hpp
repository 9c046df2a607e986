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

#include <cstddef>
#include <span>
#include <vector>

namespace optpop {

/// Objective and constraint values at one point.
struct Evaluation {
  double objective = 0.0;
  std::vector<double> equalities;
  std::vector<double> inequalities;
};

/// A smooth, box-bounded nonlinear program in minimisation form:
///
///   min f(x)  s.t.  c_E(x) = 0,  c_I(x) >= 0,  lower <= x <= upper.
///
/// Implementations must be safe to evaluate concurrently from several
/// threads. Evaluation outside the model domain throws DomainError.
class SmoothProblem {
 public:
  virtual ~SmoothProblem() = default;

  virtual std::size_t num_variables() const = 0;
  virtual std::size_t num_equalities() const = 0;
  virtual std::size_t num_inequalities() const = 0;
  virtual std::span<const double> lower_bounds() const = 0;
  virtual std::span<const double> upper_bounds() const = 0;

  virtual void evaluate(std::span<const double> x, Evaluation& out) const = 0;

  /// grad = w_obj * grad f + J_E^T w_eq + J_I^T w_ineq.
  virtual void weighted_gradient(std::span<const double> x, double w_obj, std::span<const double> w_eq,
                                 std::span<const double> w_ineq, std::span<double> grad) const = 0;

  /// Dense Jacobian of [c_E; c_I], row-major. The default assembles it one
  /// row at a time from weighted_gradient.
  virtual void jacobian(std::span<const double> x, std::span<double> out) const;
};

/// Central-difference step used for coordinate i: max(1e-6, 1e-6 |x_i|),
/// multiplied by `scale`.
double difference_step(double xi, double scale = 1.0);

/// Finite-difference counterpart of SmoothProblem::weighted_gradient.
void central_difference_gradient(const SmoothProblem& problem, std::span<const double> x, double w_obj,
                                 std::span<const double> w_eq, std::span<const double> w_ineq,
                                 std::span<double> grad, double step_scale = 1.0);

/// Dense Jacobian of [c_E; c_I], row-major, built from weighted_gradient.
std::vector<double> dense_jacobian(const SmoothProblem& problem, std::span<const double> x);

}  // namespace optpop
