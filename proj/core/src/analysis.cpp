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

#include "optpop/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "optpop/errors.hpp"

namespace optpop {

double gini(std::span<const double> N, std::span<const double> u) {
  if (N.size() != u.size()) throw DomainError("gini: N and u differ in length");
  if (N.empty()) throw DomainError("gini: empty schedule");
  for (std::size_t i = 0; i < N.size(); ++i) {
    if (!(u[i] > 0.0) || !std::isfinite(u[i])) throw DomainError("gini: utilities must be positive", static_cast<int>(i) + 1);
    if (!(N[i] > 0.0) || !std::isfinite(N[i])) throw DomainError("gini: populations must be positive", static_cast<int>(i) + 1);
  }
  std::vector<std::size_t> order(N.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return u[a] < u[b] || (u[a] == u[b] && N[a] < N[b]);
  });

  double total = 0.0;
  for (std::size_t i : order) total += N[i];
  std::vector<double> nu(N.size()), S(N.size());
  double running = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) {
    nu[j] = N[order[j]] / total;
    running += nu[j] * u[order[j]];
    S[j] = running;
  }
  double area = 0.0;
  for (std::size_t j = 0; j < order.size(); ++j) area += nu[j] * ((j == 0 ? 0.0 : S[j - 1]) + S[j]);
  return 1.0 - area / S.back();
}

double gini(const Trajectory& trajectory) { return gini(trajectory.populations(), trajectory.utilities()); }

double cumulative_population(const Trajectory& trajectory) {
  double s = 0.0;
  for (const auto& g : trajectory.generations) s += g.N;
  return s;
}

WelfarePoint welfare_pair(const Trajectory& trajectory, Objective objective, std::string scenario_id) {
  if (trajectory.generations.empty()) throw DomainError("welfare_pair: empty trajectory");
  WelfarePoint p;
  p.min_utility = trajectory.generations.front().u;
  for (const auto& g : trajectory.generations) {
    p.utilitarian_value += g.u * g.N;
    p.min_utility = std::min(p.min_utility, g.u);
  }
  p.objective = objective;
  p.T = trajectory.horizon();
  p.scenario_id = std::move(scenario_id);
  return p;
}

bool dominates(const WelfarePoint& a, const WelfarePoint& b) {
  return a.utilitarian_value >= b.utilitarian_value && a.min_utility >= b.min_utility &&
         (a.utilitarian_value > b.utilitarian_value || a.min_utility > b.min_utility);
}

FrontierSet build_frontier(std::vector<WelfarePoint> points) {
  FrontierSet set;
  set.dominated.assign(points.size(), false);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = 0; j < points.size(); ++j) {
      if (i != j && dominates(points[j], points[i])) {
        set.dominated[i] = true;
        break;
      }
    }
  }
  set.points = std::move(points);
  return set;
}

std::vector<WelfarePoint> FrontierSet::frontier() const {
  std::vector<WelfarePoint> out;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!dominated[i]) out.push_back(points[i]);
  }
  std::stable_sort(out.begin(), out.end(), [](const WelfarePoint& a, const WelfarePoint& b) {
    return a.utilitarian_value < b.utilitarian_value;
  });
  return out;
}

}  // namespace optpop
