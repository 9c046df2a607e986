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

#include "optpop/solver.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>

namespace optpop {

SolveReport solve_from(const NlpProblem& problem, std::vector<double> x0, const SolveOptions& options) {
  auto al = augmented_lagrangian(problem, std::move(x0), options);
  SolveReport rep;
  rep.status = al.status;
  rep.equality_norm = al.equality_norm;
  rep.inequality_violation = al.inequality_violation;
  rep.projected_gradient = al.projected_gradient;
  rep.complementarity = al.complementarity;
  rep.outer_iterations = al.outer_iterations;
  rep.inner_iterations = al.inner_iterations;
  rep.accepted_feasibility = std::move(al.accepted_feasibility);
  rep.message = std::move(al.message);
  rep.eq_multipliers = std::move(al.eq_multipliers);
  rep.ineq_multipliers = std::move(al.ineq_multipliers);
  rep.x = std::move(al.x);
  if (rep.status == SolveStatus::EvaluationError) return rep;
  try {
    rep.trajectory = problem.trajectory(rep.x);
  } catch (const std::exception& e) {
    rep.status = SolveStatus::EvaluationError;
    rep.message = std::string("trajectory reconstruction failed: ") + e.what();
    return rep;
  }
  const auto& gens = rep.trajectory.generations;
  if (problem.objective() == Objective::Utilitarian) {
    double swf = 0.0;
    for (const auto& g : gens) swf += g.u * g.N;
    rep.objective = swf;
    rep.epigraph_value = swf;
  } else {
    double umin = gens.front().u;
    for (const auto& g : gens) umin = std::min(umin, g.u);
    rep.objective = umin;
    rep.epigraph_value = rep.x[problem.min_utility_index()];
  }
  return rep;
}

namespace {

// splitmix64: portable, so perturbed starts are identical on every platform.
std::uint64_t mix(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t& state) { return static_cast<double>(mix(state) >> 11) * 0x1.0p-53; }

bool better(const SolveReport& a, int a_index, const SolveReport& b, int b_index) {
  if (a.optimal() != b.optimal()) return a.optimal();
  if (a.optimal()) {
    const double tie = 1e-9 * std::max(1.0, std::abs(b.objective));
    if (a.objective > b.objective + tie) return true;
    if (a.objective < b.objective - tie) return false;
  }
  if (a.feasibility() != b.feasibility()) return a.feasibility() < b.feasibility();
  return a_index < b_index;
}

}  // namespace

std::vector<double> multistart_point(const NlpProblem& problem, int index, std::uint64_t seed) {
  auto x = initial_guess(problem, FlatStart{}).x;
  if (index == 0) return x;
  const auto& p = problem.params();
  std::uint64_t state = seed ^ (0xD1B54A32D192ED03ULL * static_cast<std::uint64_t>(index));
  auto N = problem.populations(x);
  const double spread = std::log(4.0);
  for (std::size_t i = 1; i < N.size(); ++i) {
    N[i] = std::clamp(N[i] * std::exp(spread * (2.0 * uniform01(state) - 1.0)), p.lambda_pop(), p.population_cap());
  }
  if (!scale_to_depletion(problem, N)) return x;
  std::vector<double> n(N.size() - 1);
  for (std::size_t i = 0; i + 1 < N.size(); ++i) n[i] = N[i + 1] / N[i] - 1.0;
  try {
    const auto traj = forward_simulate(n, p, problem.horizon());
    std::vector<double> k;
    for (const auto& g : traj.generations) k.push_back(g.k);
    return problem.pack(N, k);
  } catch (const std::exception&) {
    return x;
  }
}

SolveReport multistart(const NlpProblem& problem, const SolveOptions& options) {
  options.validate();
  const int count = options.multistart_count;
  std::vector<SolveReport> reports(static_cast<std::size_t>(count));
  auto run = [&](int i) { return solve_from(problem, multistart_point(problem, i, options.seed), options); };

  if (options.workers <= 1 || count == 1) {
    for (int i = 0; i < count; ++i) reports[static_cast<std::size_t>(i)] = run(i);
  } else {
    for (int begin = 0; begin < count; begin += options.workers) {
      const int end = std::min(count, begin + options.workers);
      std::vector<std::future<SolveReport>> jobs;
      for (int i = begin; i < end; ++i) jobs.push_back(std::async(std::launch::async, run, i));
      for (int i = begin; i < end; ++i) reports[static_cast<std::size_t>(i)] = jobs[static_cast<std::size_t>(i - begin)].get();
    }
  }

  int best = 0;
  for (int i = 1; i < count; ++i) {
    if (better(reports[static_cast<std::size_t>(i)], i, reports[static_cast<std::size_t>(best)], best)) best = i;
  }
  std::vector<StartSummary> starts;
  for (int i = 0; i < count; ++i) {
    const auto& r = reports[static_cast<std::size_t>(i)];
    starts.push_back({i, r.status, r.objective, r.feasibility()});
  }
  SolveReport out = std::move(reports[static_cast<std::size_t>(best)]);
  out.start_index = best;
  out.starts = std::move(starts);
  return out;
}

SolveReport solve(const NlpProblem& problem, const SolveOptions& options) { return multistart(problem, options); }

}  // namespace optpop
