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

#include "optpop/horizon_search.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <sstream>

#include "optpop/errors.hpp"

namespace optpop {

namespace {

bool preferable(const SolveReport& a, const SolveReport& b) {
  if (a.optimal() != b.optimal()) return a.optimal();
  if (a.optimal()) return a.objective > b.objective;
  return a.feasibility() < b.feasibility();
}

SweepEntry certified_entry(const ScenarioParams& params, int T) {
  SweepEntry e;
  e.T = T;
  e.certified_infeasible = true;
  e.report.status = SolveStatus::Infeasible;
  std::ostringstream msg;
  msg << "minimum resource use " << minimum_resource_use(params, T) << " exceeds the reserve " << params.R_bar();
  e.report.message = msg.str();
  return e;
}

SweepEntry solve_horizon(const ScenarioParams& params, Objective objective, int T, const Trajectory* prior,
                         const SolveOptions& options) {
  if (minimum_resource_use(params, T) > params.R_bar()) return certified_entry(params, T);
  const auto problem = build_problem(params, T, objective);
  SweepEntry e;
  e.T = T;
  if (prior != nullptr) {
    auto guess = initial_guess(problem, WarmStart{prior});
    e.warm_started = !guess.fell_back_to_flat;
    e.report = solve_from(problem, std::move(guess.x), options);
    e.report.start_fell_back_to_flat = guess.fell_back_to_flat;
    if (e.report.optimal() || !e.warm_started) return e;
    e.retried_from_flat = true;
    auto retry = solve_from(problem, initial_guess(problem, FlatStart{}).x, options);
    if (preferable(retry, e.report)) e.report = std::move(retry);
    return e;
  }
  e.report = solve_from(problem, initial_guess(problem, FlatStart{}).x, options);
  return e;
}

void finish(SweepResult& result) {
  const auto best = best_entry(result.entries);
  if (!best) {
    std::ostringstream msg;
    msg << "no horizon in [" << result.T_min << ", " << result.T_max << "] was solved to optimality:";
    for (const auto& e : result.entries) msg << " T=" << e.T << ' ' << to_string(e.report.status) << ';';
    throw SweepError(msg.str(), result.entries);
  }
  result.T_star = result.entries[*best].T;
  result.objective_at_star = result.entries[*best].report.objective;
}

}  // namespace

const SweepEntry* SweepResult::find(int T) const {
  const auto it = std::lower_bound(entries.begin(), entries.end(), T,
                                   [](const SweepEntry& e, int value) { return e.T < value; });
  return it != entries.end() && it->T == T ? &*it : nullptr;
}

const SweepEntry& SweepResult::star() const {
  const auto* e = find(T_star);
  if (e == nullptr) throw std::logic_error("sweep result has no entry at T_star");
  return *e;
}

std::string SweepResult::schedule() const {
  std::ostringstream s;
  s << T_min << ':' << T_max << ':' << step;
  if (refine_radius >= 0) s << " refine " << refine_radius;
  return s.str();
}

double minimum_resource_use(const ScenarioParams& params, int T) {
  double H = params.H1();
  double used = 0.0;
  for (int t = 1; t <= T; ++t) {
    const double N = t == 1 ? params.N1() : params.lambda_pop();
    used += params.theta() * H * N;
    H *= 1.0 - params.rho() * N;
  }
  return used;
}

std::optional<int> max_feasible_horizon(const ScenarioParams& params, int limit) {
  double H = params.H1();
  double used = 0.0;
  for (int t = 1; t <= limit; ++t) {
    const double N = t == 1 ? params.N1() : params.lambda_pop();
    used += params.theta() * H * N;
    if (used > params.R_bar()) return t - 1;
    H *= 1.0 - params.rho() * N;
  }
  return std::nullopt;
}

std::optional<std::size_t> best_entry(const std::vector<SweepEntry>& entries) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto& r = entries[i].report;
    if (!r.optimal()) continue;
    if (!best || r.objective > entries[*best].report.objective ||
        (r.objective == entries[*best].report.objective && entries[i].T < entries[*best].T)) {
      best = i;
    }
  }
  return best;
}

SweepResult sweep(const ScenarioParams& params, Objective objective, int T_min, int T_max, int step,
                  const SweepOptions& options) {
  if (T_min < 2) throw ConfigError("sweep: T_min must be at least 2");
  if (T_max < T_min) throw ConfigError("sweep: T_max must be >= T_min");
  if (step < 1) throw ConfigError("sweep: step must be >= 1");
  if (options.workers < 1) throw ConfigError("sweep: workers must be >= 1");
  options.solve.validate();

  SweepResult result;
  result.objective = objective;
  result.T_min = T_min;
  result.T_max = T_max;
  result.step = step;

  std::vector<int> horizons;
  for (int T = T_min; T <= T_max; T += step) horizons.push_back(T);

  if (options.warm_start) {
    result.entries.reserve(horizons.size());
    const Trajectory* prior = nullptr;
    for (int T : horizons) {
      result.entries.push_back(solve_horizon(params, objective, T, prior, options.solve));
      const auto& e = result.entries.back();
      if (e.report.optimal()) prior = &e.report.trajectory;
      if (options.on_entry) options.on_entry(e);
    }
  } else {
    result.entries.resize(horizons.size());
    const std::size_t batch = static_cast<std::size_t>(options.workers);
    for (std::size_t begin = 0; begin < horizons.size(); begin += batch) {
      const std::size_t end = std::min(horizons.size(), begin + batch);
      std::vector<std::future<SweepEntry>> jobs;
      for (std::size_t i = begin; i < end; ++i) {
        jobs.push_back(std::async(options.workers > 1 ? std::launch::async : std::launch::deferred,
                                  solve_horizon, std::cref(params), objective, horizons[i], nullptr,
                                  std::cref(options.solve)));
      }
      for (std::size_t i = begin; i < end; ++i) {
        result.entries[i] = jobs[i - begin].get();
        if (options.on_entry) options.on_entry(result.entries[i]);
      }
    }
  }
  finish(result);
  return result;
}

SweepResult refine(const ScenarioParams& params, const SweepResult& coarse, int radius, const SweepOptions& options) {
  if (radius < 0) throw ConfigError("refine: radius must be >= 0");
  if (coarse.find(coarse.T_star) == nullptr) throw ConfigError("refine: coarse sweep has no T_star");
  const int lo = std::max(2, coarse.T_star - radius);
  const int hi = coarse.T_star + radius;

  // Warm start from the closest Optimal coarse entry at or below lo.
  const Trajectory* prior = nullptr;
  for (const auto& e : coarse.entries) {
    if (e.T > lo) break;
    if (e.report.optimal()) prior = &e.report.trajectory;
  }
  if (prior == nullptr && options.warm_start) prior = &coarse.star().report.trajectory;

  std::vector<SweepEntry> fine;
  fine.reserve(static_cast<std::size_t>(hi - lo + 1));
  for (int T = lo; T <= hi; ++T) {
    fine.push_back(solve_horizon(params, coarse.objective, T, options.warm_start ? prior : nullptr, options.solve));
    if (fine.back().report.optimal()) prior = &fine.back().report.trajectory;
    if (options.on_entry) options.on_entry(fine.back());
  }

  SweepResult merged;
  merged.objective = coarse.objective;
  merged.T_min = coarse.T_min;
  merged.T_max = coarse.T_max;
  merged.step = coarse.step;
  merged.refine_radius = radius;
  std::size_t i = 0, j = 0;
  while (i < coarse.entries.size() || j < fine.size()) {
    if (j == fine.size() || (i < coarse.entries.size() && coarse.entries[i].T < fine[j].T)) {
      merged.entries.push_back(coarse.entries[i++]);
    } else if (i == coarse.entries.size() || fine[j].T < coarse.entries[i].T) {
      merged.entries.push_back(std::move(fine[j++]));
    } else {
      if (preferable(coarse.entries[i].report, fine[j].report)) {
        merged.entries.push_back(coarse.entries[i]);
      } else {
        merged.entries.push_back(std::move(fine[j]));
      }
      ++i;
      ++j;
    }
  }
  finish(merged);
  return merged;
}

}  // namespace optpop
