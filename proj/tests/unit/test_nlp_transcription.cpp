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
#include <vector>

#include "optpop/errors.hpp"
#include "optpop/nlp_transcription.hpp"
#include "optpop/solver.hpp"
#include "optpop/validation.hpp"

using namespace optpop;

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

std::vector<double> constant_schedule(const NlpProblem& prob, double N) {
  const int T = prob.horizon();
  std::vector<double> Ns(T, N);
  Ns[0] = prob.params().N1();
  std::vector<double> n(T - 1);
  for (int t = 0; t + 1 < T; ++t) n[t] = Ns[t + 1] / Ns[t] - 1.0;
  const auto traj = forward_simulate(n, prob.params(), T);
  std::vector<double> k;
  for (const auto& g : traj.generations) k.push_back(g.k);
  return prob.pack(Ns, k);
}

}  // namespace

TEST_CASE("problem dimensions") {
  const auto p = scenario_a();
  for (int T : {2, 10, 40, 80}) {
    const auto u = build_problem(p, T, Objective::Utilitarian);
    const auto m = build_problem(p, T, Objective::Maximin);
    CHECK(u.num_variables() == static_cast<std::size_t>(2 * (T - 1)));
    CHECK(m.num_variables() == static_cast<std::size_t>(2 * (T - 1) + 1));
    CHECK(u.num_equalities() == static_cast<std::size_t>(T));
    CHECK(m.num_equalities() == static_cast<std::size_t>(T));
    CHECK(u.num_inequalities() == static_cast<std::size_t>(T + (T - 1)));
    CHECK(m.num_inequalities() == static_cast<std::size_t>(2 * T + (T - 1)));
  }
  CHECK(build_problem(p, 40, Objective::Utilitarian).num_variables() == 78);
  CHECK(build_problem(p, 40, Objective::Maximin).num_variables() == 79);
  CHECK_THROWS_AS(build_problem(p, 1, Objective::Utilitarian), ConfigError);
}

TEST_CASE("bounds") {
  const auto p = scenario_a();
  const auto prob = build_problem(p, 10, Objective::Maximin);
  const auto lo = prob.lower_bounds();
  const auto hi = prob.upper_bounds();
  for (int t = 2; t <= 10; ++t) {
    CHECK(lo[prob.population_index(t)] == p.lambda_pop());
    CHECK(hi[prob.population_index(t)] == doctest::Approx(0.999 / p.rho()));
    CHECK(lo[prob.capital_index(t)] == 1e-7);
    CHECK(hi[prob.capital_index(t)] == 1e7);
  }
  CHECK(lo[prob.min_utility_index()] == p.mu());
}

TEST_CASE("objective names") {
  CHECK(parse_objective("utilitarian") == Objective::Utilitarian);
  CHECK(parse_objective("maximin") == Objective::Maximin);
  CHECK_FALSE(parse_objective("rawls").has_value());
  CHECK(to_string(Objective::Maximin) == "maximin");
}

TEST_CASE("smallest horizon evaluates") {
  const auto prob = build_problem(scenario_b(), 2, Objective::Utilitarian);
  const auto x = initial_guess(prob, FlatStart{}).x;
  Evaluation ev;
  prob.evaluate(x, ev);
  CHECK(std::isfinite(ev.objective));
  CHECK(ev.equalities.size() == 2);
}

TEST_CASE("utilitarian objective equals the forward-pass welfare") {
  const auto p = scenario_a();
  const auto prob = build_problem(p, 5, Objective::Utilitarian);
  const auto x = constant_schedule(prob, 1.0);
  const auto traj = forward_simulate(std::vector<double>(4, 0.0), p, 5);
  double welfare = 0.0;
  for (const auto& g : traj.generations) welfare += g.u * g.N;
  CHECK(prob.welfare(x) == doctest::Approx(welfare).epsilon(1e-13));
  Evaluation ev;
  prob.evaluate(x, ev);
  CHECK(ev.objective == doctest::Approx(-welfare).epsilon(1e-13));
  for (int t = 0; t < 4; ++t) CHECK(std::abs(ev.equalities[t]) < 1e-10);
  const auto& last = traj.generations.back();
  CHECK(ev.equalities[prob.terminal_constraint_index()] ==
        doctest::Approx(last.R - p.theta() * last.H * last.N).epsilon(1e-13));

  const auto doubled = constant_schedule(prob, 2.0);
  const auto traj2 = prob.trajectory(doubled);
  double welfare2 = 0.0;
  for (const auto& g : traj2.generations) welfare2 += g.u * g.N;
  CHECK(prob.welfare(doubled) == doctest::Approx(welfare2).epsilon(1e-13));
}

TEST_CASE("maximin objective is the epigraph variable") {
  const auto prob = build_problem(scenario_a(), 6, Objective::Maximin);
  auto x = initial_guess(prob, FlatStart{}).x;
  x[prob.min_utility_index()] = 1.02;
  CHECK(prob.welfare(x) == 1.02);
  const auto g = prob.welfare_gradient(x);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(g[i] == (i == prob.min_utility_index() ? 1.0 : 0.0));
}

TEST_CASE("epigraph rows with u_min at the minimum utility") {
  const auto prob = build_problem(scenario_a(), 8, Objective::Maximin);
  auto x = constant_schedule(prob, 0.8);
  const auto u = prob.utilities(x);
  x[prob.min_utility_index()] = *std::min_element(u.begin(), u.end());
  Evaluation ev;
  prob.evaluate(x, ev);
  double smallest = 1e300;
  for (int t = 0; t < 8; ++t) {
    const double row = ev.inequalities[prob.epigraph_offset() + t];
    CHECK(row >= -1e-12);
    smallest = std::min(smallest, row);
  }
  CHECK(std::abs(smallest) <= 1e-12);
}

TEST_CASE("capital perturbation touches only adjacent residuals") {
  const auto prob = build_problem(scenario_a(), 10, Objective::Utilitarian);
  const auto x = constant_schedule(prob, 1.0);
  auto y = x;
  y[prob.capital_index(5)] += 1e-3;
  Evaluation e0, e1;
  prob.evaluate(x, e0);
  prob.evaluate(y, e1);
  for (std::size_t i = 0; i < e0.equalities.size(); ++i) {
    const bool changed = e0.equalities[i] != e1.equalities[i];
    // Residual rows are 0-based: row 3 links k_4 to k_5, row 4 links k_5 to k_6.
    CHECK_MESSAGE(changed == (i == 3 || i == 4), "row " << i);
  }
}

TEST_CASE("stocks depend only on populations") {
  const auto prob = build_problem(scenario_b(), 12, Objective::Utilitarian);
  const auto x = constant_schedule(prob, 1.3);
  auto y = x;
  for (int t = 2; t <= 12; ++t) y[prob.capital_index(t)] *= 1.1;
  const auto a = prob.trajectory(x);
  const auto b = prob.trajectory(y);
  for (int t = 0; t < 12; ++t) {
    CHECK(a.generations[t].G == b.generations[t].G);
    CHECK(a.generations[t].H == b.generations[t].H);
    CHECK(a.generations[t].A == b.generations[t].A);
    CHECK(a.generations[t].R == b.generations[t].R);
  }
}

TEST_CASE("pack and trajectory are inverse") {
  const auto prob = build_problem(scenario_a(), 7, Objective::Maximin);
  const auto x = multistart_point(prob, 2, 99);
  const auto traj = prob.trajectory(x);
  const auto y = prob.pack(traj.populations(), prob.capitals(x));
  for (std::size_t i = 0; i + 1 < x.size(); ++i) CHECK(y[i] == x[i]);
}

TEST_CASE("analytic derivatives agree with finite differences") {
  const auto a = scenario_a();
  for (auto obj : {Objective::Utilitarian, Objective::Maximin}) {
    for (int T : {2, 5, 30}) {
      const auto r = check_gradient(build_problem(a, T, obj), 5);
      CHECK_MESSAGE(r.passed, r.name << ": " << r.measured << " " << r.detail);
    }
  }
  auto central = build_problem(scenario_b(), 6, Objective::Utilitarian, DerivativeMode::CentralDifference);
  const auto analytic = build_problem(scenario_b(), 6, Objective::Utilitarian);
  const auto x = multistart_point(analytic, 1, 4);
  std::vector<double> w_eq(analytic.num_equalities(), 0.3), w_in(analytic.num_inequalities(), -0.2);
  std::vector<double> g1(x.size()), g2(x.size());
  analytic.weighted_gradient(x, 1.0, w_eq, w_in, g1);
  central.weighted_gradient(x, 1.0, w_eq, w_in, g2);
  for (std::size_t i = 0; i < x.size(); ++i) CHECK(g1[i] == doctest::Approx(g2[i]).epsilon(1e-5));
}

TEST_CASE("a wrong residual sign is caught by the gradient check") {
  auto prob = build_problem(scenario_a(), 10, Objective::Utilitarian);
  prob.set_residual_sign_for_testing(-1.0);
  CHECK_FALSE(check_gradient(prob, 5).passed);
}

TEST_CASE("initial guesses") {
  const auto p = scenario_a();
  const auto prob5 = build_problem(p, 5, Objective::Utilitarian);
  const auto flat = initial_guess(prob5, FlatStart{});
  CHECK_FALSE(flat.fell_back_to_flat);
  for (std::size_t i = 0; i < flat.x.size(); ++i) {
    CHECK(flat.x[i] >= prob5.lower_bounds()[i]);
    CHECK(flat.x[i] <= prob5.upper_bounds()[i]);
  }

  const auto prob40 = build_problem(p, 40, Objective::Utilitarian);
  const auto flat40 = initial_guess(prob40, FlatStart{});
  Evaluation ev_flat;
  prob40.evaluate(flat40.x, ev_flat);
  CHECK(max_abs(ev_flat.equalities) > 0.0);

  SolveOptions opts;
  opts.multistart_count = 1;
  const auto solved = solve(prob40, opts);
  REQUIRE(solved.optimal());
  const auto prob41 = build_problem(p, 41, Objective::Utilitarian);
  const auto warm = initial_guess(prob41, WarmStart{&solved.trajectory});
  CHECK_FALSE(warm.fell_back_to_flat);
  Evaluation ev_warm, ev_cold;
  prob41.evaluate(warm.x, ev_warm);
  prob41.evaluate(initial_guess(prob41, FlatStart{}).x, ev_cold);
  CHECK(max_abs(ev_warm.equalities) < max_abs(ev_cold.equalities));
  const auto traj = prob41.trajectory(warm.x);
  CHECK(traj.generations.front().N == p.N1());
  CHECK(traj.generations.front().k == p.k1());
}
