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

#include <cmath>
#include <random>
#include <vector>

#include "optpop/errors.hpp"
#include "optpop/olg_model.hpp"
#include "optpop/scenario.hpp"
#include "optpop/steady_state.hpp"

using namespace optpop;

namespace {

ScenarioFields base_fields() { return scenario_a().fields(); }

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("reference scenarios carry the shared constants") {
    const auto a = scenario_a();
    const auto b = scenario_b();
    CHECK(a.alpha() == 0.3);
    CHECK(a.beta() == 0.5);
    CHECK(a.gamma() == 0.4);
    CHECK(a.delta() == 0.3);
    CHECK(a.theta() == 1.0);
    CHECK(a.mu() == 1.0);
    CHECK(a.lambda_pop() == 0.1);
    CHECK(a.omega() == 3.37);
    CHECK(a.R_bar() == 50.0);
    CHECK(a.k1() == 0.2);
    CHECK(a.sigma() == 0.001);
    CHECK(a.rho() == 0.006);
    CHECK(b.sigma() == 0.002);
    CHECK(b.rho() == 0.001);
    CHECK(a.impatience() == doctest::Approx(std::pow(0.5, -2.5)));
  }

  TEST_CASE("invalid fields are rejected") {
    auto f = base_fields();
    f.gamma = 1.0;
    CHECK_THROWS_AS(ScenarioParams{f}, ConfigError);
    f = base_fields();
    f.delta = 1.0;
    CHECK_THROWS_AS(ScenarioParams{f}, ConfigError);
    f = base_fields();
    f.alpha = 1.2;
    CHECK_THROWS_AS(ScenarioParams{f}, ConfigError);
    f = base_fields();
    f.R_bar = -1.0;
    CHECK_THROWS_AS(ScenarioParams{f}, ConfigError);
    f = base_fields();
    f.N1 = 0.0;
    CHECK_THROWS_AS(ScenarioParams{f}, ConfigError);
  }
}

TEST_SUITE("olg-model") {
  const auto p = scenario_a();

  TEST_CASE("wage") {
    CHECK(wage(1.0, 1.0, p) == doctest::Approx(0.7).epsilon(1e-15));
    CHECK(wage(0.2, 1.0, p) == doctest::Approx(0.431923704).epsilon(1e-9));
    CHECK(wage(1.0, 2.0, p) == doctest::Approx(1.4).epsilon(1e-15));
    CHECK_THROWS_AS(wage(0.0, 1.0, p), DomainError);
    CHECK_THROWS_AS(wage(1.0, -1.0, p), DomainError);
  }

  TEST_CASE("rate of return") {
    CHECK(rate_of_return(1.0, p) == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(rate_of_return(0.2, p) == doctest::Approx(0.625550794).epsilon(1e-9));
    CHECK(rate_of_return(1e12, p) == doctest::Approx(-p.delta()).epsilon(1e-6));
    CHECK_THROWS_AS(rate_of_return(0.0, p), DomainError);
  }

  TEST_CASE("savings rule") {
    CHECK(savings_rule(1.0, 0.0, p) == doctest::Approx(0.150221105).epsilon(1e-9));
    CHECK(savings_rule(1e-300, 0.0, p) > 0.0);
    CHECK(savings_rule(2.0, 0.3, p) == doctest::Approx(2.0 * savings_rule(1.0, 0.3, p)));
    CHECK_THROWS_AS(savings_rule(1.0, -1.0, p), DomainError);
    CHECK_THROWS_AS(savings_rule(-1.0, 0.0, p), DomainError);
  }

  TEST_CASE("terminal savings") {
    CHECK(terminal_savings(1.0, p) == doctest::Approx(0.093818261).epsilon(1e-9));
    auto f = base_fields();
    f.delta = 0.0;
    const ScenarioParams no_depreciation(f);
    CHECK(terminal_savings(1.0, no_depreciation) == doctest::Approx(savings_rule(1.0, 0.0, no_depreciation)));
  }

  TEST_CASE("lifetime utility") {
    CHECK(lifetime_utility(1.0, 1.0, p) == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(lifetime_utility(0.5, 0.25, p) == doctest::Approx(1.462319327).epsilon(1e-9));
    CHECK(lifetime_utility(0.6, 0.25, p) > lifetime_utility(0.5, 0.25, p));
    CHECK(lifetime_utility(0.5, 0.3, p) > lifetime_utility(0.5, 0.25, p));
    CHECK_THROWS_AS(lifetime_utility(0.0, 1.0, p), DomainError);
    CHECK_THROWS_AS(lifetime_utility(1.0, -1.0, p), DomainError);
  }

  TEST_CASE("productivity growth") {
    CHECK(productivity_growth(0.0, p) == 0.0);
    CHECK(productivity_growth(1.0, p) == doctest::Approx(-0.005006).epsilon(1e-12));
    CHECK(productivity_growth(1.0, scenario_b()) == doctest::Approx(0.000998).epsilon(1e-12));
    CHECK_THROWS_AS(productivity_growth(1.0 / p.rho(), p), DomainError);
    CHECK_THROWS_AS(productivity_growth(-1.0, p), DomainError);
  }

  TEST_CASE("state update") {
    StockState s;
    s.G = 1.0;
    s.H = 1.0;
    s.A = 1.0;
    s.R = 50.0;
    const auto next = state_update(s, 1.0, p);
    CHECK(next.G == doctest::Approx(1.001));
    CHECK(next.H == doctest::Approx(0.994));
    CHECK(next.A == doctest::Approx(1.001 * 0.994));
    CHECK(next.R == doctest::Approx(49.0));
    CHECK_FALSE(next.overdrawn);

    const auto idle = state_update(s, 0.0, p);
    CHECK(idle.G == s.G);
    CHECK(idle.H == s.H);
    CHECK(idle.R == s.R);

    s.R = 0.5;
    CHECK(state_update(s, 1.0, p).overdrawn);
  }

  TEST_CASE("recursive stocks match their cumulative form") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> draw(0.1, 5.0);
    StockState s;
    s.R = p.R_bar();
    double used = 0.0;
    for (int t = 0; t < 10; ++t) {
      const double N = draw(gen);
      used += s.H * N;
      s = state_update(s, N, p);
      CHECK(s.H == doctest::Approx(1.0 - p.rho() * used).epsilon(1e-12));
      CHECK(s.R == doctest::Approx(p.R_bar() - p.theta() * used).epsilon(1e-12));
      CHECK(s.A == doctest::Approx(s.G * s.H).epsilon(1e-15));
    }
  }

  TEST_CASE("capital residual vanishes on the steady state") {
    for (double k : {0.05, 0.1, 0.2}) {
      const double n = steady_state_n(k, p);
      CHECK(std::abs(capital_residual(k, k, 0.0, n, p)) < 1e-10);
    }
    const double k = 0.1;
    const double n = steady_state_n(k, p);
    CHECK(capital_residual(k, k, 0.0, n + 0.1, p) != doctest::Approx(capital_residual(k, k, 0.0, n + 0.2, p)));
    CHECK_THROWS_AS(capital_residual(0.0, 0.1, 0.0, 0.0, p), DomainError);
  }

  TEST_CASE("solve_k_next") {
    const double k_star = 0.1;
    const double n = steady_state_n(k_star, p);
    CHECK(solve_k_next(k_star, 0.0, n, p) == doctest::Approx(k_star).epsilon(1e-9));

    const double k1 = solve_k_next(0.2, -0.005, 0.5, p);
    CHECK(std::abs(capital_residual(0.2, k1, -0.005, 0.5, p)) < 1e-12);
    CHECK(solve_k_next(0.2, -0.005, 0.5, p) == k1);

    const double lo = solve_k_next(0.2, 0.0, 0.0, p);
    const double mid = solve_k_next(0.2, 0.0, 0.5, p);
    const double hi = solve_k_next(0.2, 0.0, 1.0, p);
    CHECK(lo > mid);
    CHECK(mid > hi);
  }

  TEST_CASE("forward simulation with constant population") {
    const std::vector<double> n(4, 0.0);
    const auto traj = forward_simulate(n, p, 5);
    REQUIRE(traj.horizon() == 5);
    double used = 0.0;
    double H = 1.0;
    for (const auto& g : traj.generations) {
      CHECK(g.N == doctest::Approx(1.0));
      CHECK(g.H == doctest::Approx(H).epsilon(1e-14));
      used += H;
      H *= 1.0 - p.rho();
    }
    CHECK(traj.terminal_reserve == doctest::Approx(50.0 - used).epsilon(1e-12));
    CHECK(check_invariants(traj, p).ok);
    const auto& last = traj.generations.back();
    CHECK(last.d_old == doctest::Approx((1.0 - p.delta()) * last.s));
  }

  TEST_CASE("smallest horizon") {
    const std::vector<double> n{0.3};
    const auto traj = forward_simulate(n, p, 2);
    REQUIRE(traj.horizon() == 2);
    for (const auto& g : traj.generations) CHECK(std::isfinite(g.u));
    CHECK_THROWS_AS(forward_simulate(std::vector<double>{}, p, 1), DomainError);
    CHECK_THROWS_AS(forward_simulate(std::vector<double>{-1.5}, p, 2), DomainError);
  }

  TEST_CASE("evaluate_schedule agrees with forward simulation") {
    const std::vector<double> n{0.5, -0.2, 0.1, 0.0, 0.3};
    const auto sim = forward_simulate(n, p, 6);
    std::vector<double> N, k;
    for (const auto& g : sim.generations) {
      N.push_back(g.N);
      k.push_back(g.k);
    }
    const auto rebuilt = evaluate_schedule(N, k, p);
    for (int t = 0; t < 6; ++t) {
      CHECK(rebuilt.generations[t].u == sim.generations[t].u);
      CHECK(rebuilt.generations[t].R == sim.generations[t].R);
    }
    CHECK(rebuilt.terminal_reserve == sim.terminal_reserve);
  }
}

TEST_SUITE("olg-model properties") {
  TEST_CASE("Euler identity holds at the savings rule") {
    const auto p = scenario_b();
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> w_draw(0.01, 5.0), r_draw(-0.9, 3.0);
    for (int i = 0; i < 500; ++i) {
      const double w = w_draw(gen), r = r_draw(gen);
      const double s = savings_rule(w, r, p);
      const double lhs = std::pow(w - s, -p.gamma());
      const double rhs = p.beta() * (1.0 + r) * std::pow((1.0 + r) * s, -p.gamma());
      CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(lhs));
    }
  }

  TEST_CASE("zero profit") {
    const auto p = scenario_a();
    for (double k : {1e-3, 0.05, 0.2, 1.0, 7.0}) {
      const double f = std::pow(k, p.alpha());
      const double fprime = p.alpha() * std::pow(k, p.alpha() - 1.0);
      CHECK(std::abs(f - (fprime * k + wage(k, 1.0, p))) <= 1e-12 * f);
    }
  }

  TEST_CASE("stock conservation and productivity identity on random simulations") {
    const auto p = scenario_a();
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> draw(-0.3, 0.4);
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> n(14);
      for (auto& v : n) v = draw(gen);
      const auto traj = forward_simulate(n, p, 15);
      double used = 0.0;
      for (const auto& g : traj.generations) {
        used += g.H * g.N;
        CHECK(g.A == doctest::Approx(g.G * g.H).epsilon(1e-15));
      }
      CHECK(std::abs(traj.terminal_reserve - (p.R_bar() - p.theta() * used)) <= 1e-10);
      const auto inv = check_invariants(traj, p);
      CHECK_MESSAGE(inv.ok, inv.first_failure);
    }
  }

  TEST_CASE("root finder is deterministic") {
    const auto p = scenario_b();
    for (double n : {-0.5, 0.0, 0.7, 2.0}) CHECK(solve_k_next(0.15, 0.001, n, p) == solve_k_next(0.15, 0.001, n, p));
  }
}
