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

#include <span>
#include <string>
#include <vector>

#include "optpop/nlp_transcription.hpp"
#include "optpop/olg_model.hpp"

namespace optpop {

/// Population-weighted Gini index of lifetime utility. Generations are
/// sorted by (u, N), so the result does not depend on input order. Throws DomainError on
/// non-positive u or N, or mismatched lengths.
double gini(std::span<const double> N, std::span<const double> u);
double gini(const Trajectory& trajectory);

/// Sum of N_t.
double cumulative_population(const Trajectory& trajectory);

struct WelfarePoint {
  double utilitarian_value = 0.0;  ///< sum u_t N_t
  double min_utility = 0.0;        ///< min_t u_t
  Objective objective = Objective::Utilitarian;
  int T = 0;
  std::string scenario_id;
};

/// Evaluates a trajectory under both welfare criteria.
WelfarePoint welfare_pair(const Trajectory& trajectory, Objective objective = Objective::Utilitarian,
                          std::string scenario_id = {});

/// True if `a` is at least as good as `b` in both coordinates and strictly
/// better in one.
bool dominates(const WelfarePoint& a, const WelfarePoint& b);

struct FrontierSet {
  std::vector<WelfarePoint> points;
  std::vector<bool> dominated;  ///< parallel to `points`

  /// Non-dominated points in ascending utilitarian value.
  std::vector<WelfarePoint> frontier() const;
};

FrontierSet build_frontier(std::vector<WelfarePoint> points);

}  // namespace optpop
