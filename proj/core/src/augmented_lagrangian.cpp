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

#include "optpop/augmented_lagrangian.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optpop/errors.hpp"
#include "optpop/projected_quasi_newton.hpp"

namespace optpop {

void SolveOptions::validate() const {
  auto fail = [](const char* what) { throw ConfigError(std::string("solver option ") + what); };
  if (max_outer_iterations < 1) fail("max_outer_iterations must be >= 1");
  if (max_inner_iterations < 1) fail("max_inner_iterations must be >= 1");
  if (!(initial_penalty > 0.0)) fail("initial_penalty must be > 0");
  if (!(penalty_growth > 1.0)) fail("penalty_growth must be > 1");
  if (!(penalty_cap >= initial_penalty)) fail("penalty_cap must be >= initial_penalty");
  if (!(equality_tolerance > 0.0 && equality_tolerance < 1.0)) fail("equality_tolerance must be in (0,1)");
  if (!(stationarity_tolerance > 0.0 && stationarity_tolerance < 1.0)) fail("stationarity_tolerance must be in (0,1)");
  if (multistart_count < 1) fail("multistart_count must be >= 1");
  if (workers < 1) fail("workers must be >= 1");
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::IterationLimit: return "iteration_limit";
    case SolveStatus::EvaluationError: return "evaluation_error";
  }
  return "unknown";
}

namespace {

double inf_norm(std::span<const double> v) {
  double m = 0.0;
  for (double a : v) m = std::max(m, std::abs(a));
  return m;
}

double violation(std::span<const double> ineq) {
  double m = 0.0;
  for (double c : ineq) m = std::max(m, -c);
  return m;
}

// View of a problem with its objective multiplied by a positive constant.
class ScaledObjective final : public SmoothProblem {
 public:
  ScaledObjective(const SmoothProblem& base, double scale) : base_(base), scale_(scale) {}
  std::size_t num_variables() const override { return base_.num_variables(); }
  std::size_t num_equalities() const override { return base_.num_equalities(); }
  std::size_t num_inequalities() const override { return base_.num_inequalities(); }
  std::span<const double> lower_bounds() const override { return base_.lower_bounds(); }
  std::span<const double> upper_bounds() const override { return base_.upper_bounds(); }
  void evaluate(std::span<const double> x, Evaluation& out) const override {
    base_.evaluate(x, out);
    out.objective *= scale_;
  }
  void weighted_gradient(std::span<const double> x, double w_obj, std::span<const double> w_eq,
                         std::span<const double> w_ineq, std::span<double> grad) const override {
    base_.weighted_gradient(x, w_obj * scale_, w_eq, w_ineq, grad);
  }
  void jacobian(std::span<const double> x, std::span<double> out) const override { base_.jacobian(x, out); }

 private:
  const SmoothProblem& base_;
  double scale_;
};

}  // namespace

KktResiduals kkt_residuals(const SmoothProblem& problem, std::span<const double> x,
                           std::span<const double> eq_multipliers, std::span<const double> ineq_multipliers) {
  Evaluation ev;
  problem.evaluate(x, ev);
  std::vector<double> w_eq(eq_multipliers.size()), w_ineq(ineq_multipliers.size());
  for (std::size_t i = 0; i < w_eq.size(); ++i) w_eq[i] = -eq_multipliers[i];
  for (std::size_t j = 0; j < w_ineq.size(); ++j) w_ineq[j] = -ineq_multipliers[j];
  std::vector<double> g(problem.num_variables());
  problem.weighted_gradient(x, 1.0, w_eq, w_ineq, g);

  KktResiduals r;
  r.stationarity = projected_gradient_norm(x, g, problem.lower_bounds(), problem.upper_bounds());
  r.feasibility = std::max(inf_norm(ev.equalities), violation(ev.inequalities));
  for (std::size_t j = 0; j < ineq_multipliers.size(); ++j) {
    r.complementarity = std::max(r.complementarity, std::abs(ineq_multipliers[j] * ev.inequalities[j]));
  }
  return r;
}

AlResult augmented_lagrangian(const SmoothProblem& problem, std::vector<double> x0, const SolveOptions& options) {
  options.validate();
  const std::size_t n = problem.num_variables();
  const std::size_t me = problem.num_equalities();
  const std::size_t mi = problem.num_inequalities();
  const auto lower = problem.lower_bounds();
  const auto upper = problem.upper_bounds();

  AlResult res;
  res.x = std::move(x0);
  if (res.x.size() != n) throw DomainError("initial point has the wrong length");
  for (std::size_t i = 0; i < n; ++i) res.x[i] = std::clamp(res.x[i], lower[i], upper[i]);
  res.eq_multipliers.assign(me, 0.0);
  res.ineq_multipliers.assign(mi, 0.0);

  double penalty = options.initial_penalty;
  auto& lam = res.eq_multipliers;
  auto& z = res.ineq_multipliers;

  Evaluation ev;
  std::vector<double> hessian;
  double scale = 1.0;
  try {
    problem.evaluate(res.x, ev);
    scale = 1.0 / std::max(1.0, std::abs(ev.objective));
  } catch (const std::exception& e) {
    res.status = SolveStatus::EvaluationError;
    res.message = std::string("initial point: ") + e.what();
    return res;
  }
  // Objective scaled to unit size; multipliers below live in scaled units.
  const ScaledObjective scaled(problem, scale);
  const double stationarity_goal = options.stationarity_tolerance * scale;
  res.eq_multipliers = least_squares_multipliers(scaled, res.x);

  double target = std::pow(penalty, -0.1);
  double inner_tol = 1.0 / penalty;
  double last_accepted = std::numeric_limits<double>::infinity();
  int stuck_at_cap = 0;
  int continuations = 0;
  int floor_stalls = 0;
  bool converged = false;
  std::vector<double> anchor = res.x;
  double anchor_feasibility = std::max(inf_norm(ev.equalities), violation(ev.inequalities));

  for (res.outer_iterations = 1; res.outer_iterations <= options.max_outer_iterations; ++res.outer_iterations) {
    InnerOptions lo;
    lo.max_iterations = options.max_inner_iterations;
    lo.tolerance = std::max(inner_tol, 0.1 * stationarity_goal);
    const MeritTerms terms{lam, z, penalty};
    const auto inner = minimize_merit(scaled, terms, res.x, hessian, lo);
    res.inner_iterations += inner.iterations;
    if (inner.evaluation_failed) {
      res.status = SolveStatus::EvaluationError;
      res.message = "merit function could not be evaluated at the current iterate";
      break;
    }
    problem.evaluate(res.x, ev);
    const double eq_norm = inf_norm(ev.equalities);
    const double ineq_viol = violation(ev.inequalities);
    const double feas = std::max(eq_norm, ineq_viol);

    // An unfinished subproblem that is still near the anchor gets another
    // round of inner iterations with the same penalty and multipliers.
    const bool unfinished = !inner.converged && !inner.stalled;
    if (unfinished && continuations < 3 &&
        feas <= 10.0 * std::max(anchor_feasibility, options.equality_tolerance)) {
      ++continuations;
      continue;
    }
    continuations = 0;
    const bool accept = feas <= std::max(target, options.equality_tolerance) &&
                        feas <= 1.01 * std::max(last_accepted, options.equality_tolerance);
    if (accept) {
      for (std::size_t i = 0; i < me; ++i) lam[i] -= penalty * ev.equalities[i];
      for (std::size_t j = 0; j < mi; ++j) z[j] = std::max(0.0, z[j] - penalty * ev.inequalities[j]);
      res.accepted_feasibility.push_back(feas);
      last_accepted = feas;
      anchor = res.x;
      anchor_feasibility = feas;
      stuck_at_cap = 0;
      if (feas <= options.equality_tolerance && inner.projected_gradient <= stationarity_goal) {
        converged = true;
        break;
      }
      if (feas <= options.equality_tolerance && inner.stalled) {
        // Roundoff floor: the first-order update only pushes lam around.
        auto estimate = least_squares_multipliers(scaled, res.x, z);
        const double refit = kkt_residuals(scaled, res.x, estimate, z).stationarity;
        if (refit < kkt_residuals(scaled, res.x, lam, z).stationarity) lam = std::move(estimate);
        if (refit <= stationarity_goal) {
          converged = true;
          break;
        }
        if (++floor_stalls >= 5) break;
      } else {
        floor_stalls = 0;
      }
      target = std::min(target * std::pow(penalty, -0.9), feas);
      inner_tol = std::max(inner_tol / penalty, 0.1 * stationarity_goal);
    } else {
      const bool blocked_by_monotonicity = feas > 1.01 * std::max(last_accepted, options.equality_tolerance);
      if (!inner.converged || (feas > anchor_feasibility && !blocked_by_monotonicity)) {
        // The subproblem drifted away; restart the next one from the anchor.
        res.x = anchor;
        hessian.clear();
      } else {
        anchor = res.x;
        anchor_feasibility = feas;
        if (blocked_by_monotonicity) {
          // Multiplier updates are frozen until feasibility returns below the
          // last accepted level; refit lam at the subproblem solution instead.
          auto estimate = least_squares_multipliers(scaled, res.x, z);
          if (kkt_residuals(scaled, res.x, estimate, z).stationarity <
              kkt_residuals(scaled, res.x, lam, z).stationarity)
            lam = std::move(estimate);
        }
      }
      if (penalty >= options.penalty_cap) {
        if (++stuck_at_cap >= 3) break;
      }
      penalty = std::min(penalty * options.penalty_growth, options.penalty_cap);
      target = std::min(std::pow(penalty, -0.1), last_accepted);
      inner_tol = 1.0 / penalty;
    }
  }
  res.outer_iterations = std::min(res.outer_iterations, options.max_outer_iterations);
  res.penalty = penalty;

  for (double& v : lam) v /= scale;
  for (double& v : z) v /= scale;
  if (res.status != SolveStatus::EvaluationError) {
    const auto kkt = kkt_residuals(problem, res.x, lam, z);
    problem.evaluate(res.x, ev);
    res.objective = ev.objective;
    res.equality_norm = inf_norm(ev.equalities);
    res.inequality_violation = violation(ev.inequalities);
    res.projected_gradient = kkt.stationarity;
    res.complementarity = kkt.complementarity;
    const bool feasible = std::max(res.equality_norm, res.inequality_violation) <= options.equality_tolerance;
    if (converged && feasible && res.projected_gradient <= options.stationarity_tolerance) {
      res.status = SolveStatus::Optimal;
      res.message = "converged";
    } else if (!feasible && (penalty >= options.penalty_cap || stuck_at_cap > 0)) {
      res.status = SolveStatus::Infeasible;
      res.message = "constraints could not be satisfied at the penalty cap";
    } else {
      res.status = SolveStatus::IterationLimit;
      res.message = feasible ? "feasible but not stationary within the iteration limit"
                             : "iteration limit reached before feasibility";
    }
  }
  return res;
}

}  // namespace optpop
