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

#include "optpop/smooth_problem.hpp"

#include <algorithm>
#include <cmath>

namespace optpop {

double difference_step(double xi, double scale) { return scale * std::max(1e-6, 1e-6 * std::abs(xi)); }

void central_difference_gradient(const SmoothProblem& problem, std::span<const double> x, double w_obj,
                                 std::span<const double> w_eq, std::span<const double> w_ineq,
                                 std::span<double> grad, double step_scale) {
  std::vector<double> xs(x.begin(), x.end());
  Evaluation ev;
  auto phi = [&]() {
    problem.evaluate(xs, ev);
    double v = w_obj * ev.objective;
    for (std::size_t i = 0; i < w_eq.size(); ++i) v += w_eq[i] * ev.equalities[i];
    for (std::size_t j = 0; j < w_ineq.size(); ++j) v += w_ineq[j] * ev.inequalities[j];
    return v;
  };
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double h = difference_step(x[i], step_scale);
    xs[i] = x[i] + h;
    const double up = phi();
    xs[i] = x[i] - h;
    const double down = phi();
    xs[i] = x[i];
    grad[i] = (up - down) / (2.0 * h);
  }
}

void SmoothProblem::jacobian(std::span<const double> x, std::span<double> out) const {
  const std::size_t n = num_variables();
  const std::size_t me = num_equalities();
  const std::size_t mi = num_inequalities();
  std::vector<double> w_eq(me, 0.0), w_ineq(mi, 0.0);
  for (std::size_t r = 0; r < me + mi; ++r) {
    if (r < me) w_eq[r] = 1.0; else w_ineq[r - me] = 1.0;
    weighted_gradient(x, 0.0, w_eq, w_ineq, out.subspan(r * n, n));
    if (r < me) w_eq[r] = 0.0; else w_ineq[r - me] = 0.0;
  }
}

std::vector<double> dense_jacobian(const SmoothProblem& problem, std::span<const double> x) {
  std::vector<double> jac((problem.num_equalities() + problem.num_inequalities()) * problem.num_variables(), 0.0);
  problem.jacobian(x, jac);
  return jac;
}

}  // namespace optpop
