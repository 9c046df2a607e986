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

#include <vector>

#include "optpop/scenario.hpp"

namespace optpop {

/// Steady-state population growth consistent with capital intensity k
/// when productivity is constant (a = 0).
double steady_state_n(double k, const ScenarioParams& p);

/// Steady-state lifetime utility at capital intensity k, with productivity
/// fixed at A = G1 * H1.
double steady_state_utility(double k, const ScenarioParams& p);

/// Log-spaced scan range for the utility dip.
struct SteadyStateGrid {
  double k_min = 1e-3;
  double k_max = 1.0;
  int points = 2000;
  double tolerance = 1e-6;  ///< golden-section tolerance in k
};

struct SteadyStateSeries {
  std::vector<double> k;
  std::vector<double> n;
  std::vector<double> u;
};

SteadyStateSeries steady_state_series(const ScenarioParams& p, const SteadyStateGrid& grid = {});

struct FertilityMinimum {
  double k = 0.0;
  double n = 0.0;
  double u = 0.0;
};

/// Locates the capital intensity that minimises steady-state utility and the
/// fertility rate it implies. Throws DomainError if the grid minimum sits on
/// an endpoint.
FertilityMinimum find_min_utility_fertility(const ScenarioParams& p, const SteadyStateGrid& grid = {});

}  // namespace optpop
