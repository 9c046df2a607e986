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

#include "optpop/errors.hpp"
#include "optpop/horizon_search.hpp"

using namespace optpop;

namespace {

SweepOptions quick() {
  SweepOptions o;
  o.solve.multistart_count = 1;
  return o;
}

// Reserve drawn by N_1 followed by lambda-sized generations, summed directly.
double slow_minimum_use(const ScenarioParams& p, int T) {
  double H = p.H1(), used = 0.0;
  for (int t = 1; t <= T; ++t) {
    const double N = t == 1 ? p.N1() : p.lambda_pop();
    used += p.theta() * H * N;
    H *= 1.0 - p.rho() * N;
  }
  return used;
}

}  // namespace

TEST_CASE("minimum resource use and the horizon bound") {
  for (const auto& p : {scenario_a(), scenario_b()}) {
    for (int T : {2, 10, 100, 500}) {
      CHECK(minimum_resource_use(p, T) == doctest::Approx(slow_minimum_use(p, T)).epsilon(1e-12));
    }
    const auto bound = max_feasible_horizon(p);
    REQUIRE(bound.has_value());
    CHECK(minimum_resource_use(p, *bound) <= p.R_bar());
    CHECK(minimum_resource_use(p, *bound + 1) > p.R_bar());
  }
  auto f = scenario_a().fields();
  f.R_bar = 1e9;
  f.rho = 0.0;
  CHECK_FALSE(max_feasible_horizon(ScenarioParams(f), 1000).has_value());
}

TEST_CASE("range validation") {
  const auto p = scenario_a();
  CHECK_THROWS_AS(sweep(p, Objective::Utilitarian, 1, 10, 1, quick()), ConfigError);
  CHECK_THROWS_AS(sweep(p, Objective::Utilitarian, 10, 9, 1, quick()), ConfigError);
  CHECK_THROWS_AS(sweep(p, Objective::Utilitarian, 10, 20, 0, quick()), ConfigError);
}

TEST_CASE("warm sweep") {
  const auto p = scenario_a();
  auto opts = quick();
  std::vector<int> seen;
  opts.on_entry = [&](const SweepEntry& e) { seen.push_back(e.T); };
  const auto r = sweep(p, Objective::Utilitarian, 10, 22, 3, opts);
  REQUIRE(r.entries.size() == 5);
  CHECK(seen == std::vector<int>{10, 13, 16, 19, 22});
  for (std::size_t i = 1; i < r.entries.size(); ++i) CHECK(r.entries[i].T > r.entries[i - 1].T);
  for (const auto& e : r.entries) {
    CHECK(e.report.optimal());
    CHECK(e.report.objective <= r.objective_at_star);
  }
  CHECK(r.entries.front().warm_started == false);
  CHECK(r.entries.back().warm_started);
  CHECK(r.star().T == r.T_star);
  CHECK(r.find(16) != nullptr);
  CHECK(r.find(17) == nullptr);
  CHECK(r.schedule() == "10:22:3");
}

TEST_CASE("warm starts are at least as good as flat starts") {
  const auto p = scenario_b();
  auto warm = quick();
  auto cold = quick();
  cold.warm_start = false;
  const auto a = sweep(p, Objective::Maximin, 12, 32, 5, warm);
  const auto b = sweep(p, Objective::Maximin, 12, 32, 5, cold);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    if (a.entries[i].report.optimal() && b.entries[i].report.optimal()) {
      CHECK(a.entries[i].report.objective >= b.entries[i].report.objective - 1e-6);
    }
  }
}

TEST_CASE("parallel flat sweep matches the sequential flat sweep") {
  const auto p = scenario_a();
  auto seq = quick();
  seq.warm_start = false;
  auto par = seq;
  par.workers = 3;
  const auto a = sweep(p, Objective::Utilitarian, 10, 16, 1, seq);
  const auto b = sweep(p, Objective::Utilitarian, 10, 16, 1, par);
  REQUIRE(a.entries.size() == b.entries.size());
  for (std::size_t i = 0; i < a.entries.size(); ++i) {
    CHECK(a.entries[i].T == b.entries[i].T);
    CHECK(a.entries[i].report.x == b.entries[i].report.x);
  }
  CHECK(a.T_star == b.T_star);
}

TEST_CASE("refinement") {
  const auto p = scenario_a();
  const auto coarse = sweep(p, Objective::Utilitarian, 40, 80, 10, quick());
  const auto fine = refine(p, coarse, 3, quick());
  CHECK(fine.objective_at_star >= coarse.objective_at_star);
  CHECK(fine.refine_radius == 3);
  for (int T = coarse.T_star - 3; T <= coarse.T_star + 3; ++T) CHECK(fine.find(T) != nullptr);
  for (const auto& e : coarse.entries) CHECK(fine.find(e.T) != nullptr);
  for (std::size_t i = 1; i < fine.entries.size(); ++i) CHECK(fine.entries[i].T > fine.entries[i - 1].T);

  const auto same = refine(p, coarse, 0, quick());
  CHECK(same.entries.size() == coarse.entries.size());
  CHECK(same.T_star == coarse.T_star);
  CHECK(same.objective_at_star >= coarse.objective_at_star);
}

TEST_CASE("horizons beyond the reserve bound are certified infeasible") {
  const auto p = scenario_a();
  const int bound = *max_feasible_horizon(p);
  const auto r = sweep(p, Objective::Utilitarian, 20, bound + 2, bound - 18, quick());
  REQUIRE(r.entries.size() == 2);
  CHECK(r.entries[0].report.optimal());
  CHECK(r.entries[1].certified_infeasible);
  CHECK(r.entries[1].report.status == SolveStatus::Infeasible);
  CHECK(r.T_star == 20);

  try {
    (void)sweep(p, Objective::Utilitarian, bound + 1, bound + 3, 1, quick());
    FAIL("expected SweepError");
  } catch (const SweepError& e) {
    CHECK(e.entries().size() == 3);
    for (const auto& entry : e.entries()) CHECK(entry.certified_infeasible);
  }
}

TEST_CASE("best entry prefers the smallest horizon on ties") {
  std::vector<SweepEntry> entries(3);
  for (int i = 0; i < 3; ++i) {
    entries[i].T = 10 + i;
    entries[i].report.status = SolveStatus::Optimal;
    entries[i].report.objective = 5.0;
  }
  entries[0].report.status = SolveStatus::IterationLimit;
  entries[0].report.objective = 9.0;
  CHECK(best_entry(entries) == std::size_t{1});
  entries[1].report.status = SolveStatus::Infeasible;
  entries[2].report.status = SolveStatus::Infeasible;
  CHECK_FALSE(best_entry(entries).has_value());
}
