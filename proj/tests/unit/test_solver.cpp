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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "optpop/analysis.hpp"
#include "optpop/cake_eating.hpp"
#include "optpop/errors.hpp"
#include "optpop/solver.hpp"
#include "optpop/validation.hpp"

using namespace optpop;

namespace {

SolveOptions single_start() {
  SolveOptions o;
  o.multistart_count = 1;
  return o;
}

double welfare_of(const Trajectory& traj, Objective obj) {
  const auto w = welfare_pair(traj, obj);
  return obj == Objective::Utilitarian ? w.utilitarian_value : w.min_utility;
}

}  // namespace

TEST_CASE("solver options are validated") {
  SolveOptions o;
  CHECK_NOTHROW(o.validate());
  o.penalty_growth = 1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = SolveOptions{};
  o.equality_tolerance = 1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = SolveOptions{};
  o.multistart_count = 0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
  o = SolveOptions{};
  o.penalty_cap = 1.0;
  CHECK_THROWS_AS(o.validate(), ConfigError);
}

TEST_CASE("defaults") {
  const SolveOptions o;
  CHECK(o.max_outer_iterations == 60);
  CHECK(o.max_inner_iterations == 500);
  CHECK(o.initial_penalty == 10.0);
  CHECK(o.penalty_growth == 10.0);
  CHECK(o.penalty_cap == 1e8);
  CHECK(o.equality_tolerance == 1e-8);
  CHECK(o.stationarity_tolerance == 1e-6);
  CHECK(o.multistart_count == 4);
}

TEST_CASE("cake-eating through the solver") {
  CakeParams cp;
  cp.a = 1.0;
  cp.b = 1.0;
  cp.k0 = 1.0;
  cp.T = 3;
  auto r = cake_via_nlp(cp);
  REQUIRE(r.status == SolveStatus::Optimal);
  for (double c : r.consumption) CHECK(c == doctest::Approx(0.25).epsilon(1e-6));

  cp.a = 1.05;
  cp.b = 0.95;
  cp.T = 10;
  r = cake_via_nlp(cp);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.max_relative_error < 1e-6);
  CHECK(r.objective_error < 1e-8);
  CHECK(std::abs(r.capital.back()) < 1e-10);
  for (double k : r.capital) CHECK(k >= -1e-10);

  cp.a = 1.1;
  cp.b = 0.9;
  cp.T = 5;
  r = cake_via_nlp(cp);
  REQUIRE(r.status == SolveStatus::Optimal);
  const double exact = cake_objective(cp, cake_closed_form(cp));
  CHECK(std::abs(r.objective - exact) <= 1e-6 * std::abs(exact));
}

TEST_CASE("optimal report satisfies its own tolerances") {
  const auto p = scenario_a();
  for (auto obj : {Objective::Utilitarian, Objective::Maximin}) {
    const auto prob = build_problem(p, 20, obj);
    const auto opts = single_start();
    const auto r = solve(prob, opts);
    REQUIRE(r.optimal());
    CHECK(r.equality_norm <= opts.equality_tolerance);
    CHECK(r.inequality_violation <= opts.equality_tolerance);
    CHECK(r.projected_gradient <= opts.stationarity_tolerance);
    CHECK(r.objective == doctest::Approx(welfare_of(r.trajectory, obj)).epsilon(1e-10));
    const auto inv = check_invariants(r.trajectory, p, 1e-6, true);
    CHECK_MESSAGE(inv.ok, inv.first_failure);
    for (std::size_t i = 1; i < r.accepted_feasibility.size(); ++i) {
      CHECK(r.accepted_feasibility[i] <= 1.01 * std::max(r.accepted_feasibility[i - 1], opts.equality_tolerance));
    }
    if (obj == Objective::Maximin) {
      const auto u = r.trajectory.utilities();
      CHECK(std::abs(*std::min_element(u.begin(), u.end()) - r.epigraph_value) <= 1e-6);
    }
  }
}

TEST_CASE("kkt report") {
  const auto p = scenario_a();
  const auto prob = build_problem(p, 40, Objective::Utilitarian);
  const auto flat = initial_guess(prob, FlatStart{});
  const std::vector<double> lam(prob.num_equalities(), 0.0), z(prob.num_inequalities(), 0.0);
  CHECK(kkt_residuals(prob, flat.x, lam, z).feasibility > 0.0);

  for (auto obj : {Objective::Utilitarian, Objective::Maximin}) {
    const auto r = check_kkt(build_problem(p, 25, obj), single_start());
    CHECK_MESSAGE(r.passed, r.name << ": " << r.detail);
  }
}

TEST_CASE("multistart") {
  const auto p = scenario_b();
  const auto prob = build_problem(p, 15, Objective::Maximin);
  auto opts = single_start();
  const auto one = multistart(prob, opts);
  const auto direct = solve_from(prob, initial_guess(prob, FlatStart{}).x, opts);
  CHECK(one.objective == direct.objective);
  CHECK(one.x == direct.x);

  opts.multistart_count = 3;
  opts.seed = 17;
  const auto a = multistart(prob, opts);
  const auto b = multistart(prob, opts);
  CHECK(a.start_index == b.start_index);
  CHECK(a.x == b.x);
  CHECK(a.starts.size() == 3);

  opts.workers = 3;
  const auto c = multistart(prob, opts);
  CHECK(c.start_index == a.start_index);
  CHECK(c.x == a.x);

  CHECK(multistart_point(prob, 0, 1) == initial_guess(prob, FlatStart{}).x);
  CHECK(multistart_point(prob, 2, 5) == multistart_point(prob, 2, 5));
  CHECK(multistart_point(prob, 2, 5) != multistart_point(prob, 2, 6));
}

TEST_CASE("an unreachable terminal condition is reported, not returned as optimal") {
  // Two generations cannot use up the reserve under the growth bound.
  const auto prob = build_problem(scenario_b(), 2, Objective::Utilitarian);
  const auto r = solve(prob, single_start());
  CHECK_FALSE(r.optimal());
  CHECK(r.status == SolveStatus::Infeasible);
  CHECK_FALSE(r.message.empty());
}

TEST_CASE("solves are deterministic") {
  const auto prob = build_problem(scenario_a(), 30, Objective::Utilitarian);
  const auto a = solve(prob, single_start());
  const auto b = solve(prob, single_start());
  CHECK(a.x == b.x);
  CHECK(a.objective == b.objective);
  CHECK(a.inner_iterations == b.inner_iterations);
}
