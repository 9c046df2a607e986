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
#include <vector>

#include "optpop/augmented_lagrangian.hpp"

namespace optpop {

/// max sum_t b^t ln c_t  s.t.  k_{t+1} = a k_t - c_t,  k_{T+1} = 0,  t = 0..T.
struct CakeParams {
  double a = 1.0;   ///< gross return on capital
  double b = 1.0;   ///< discount factor, (0, 1]
  double k0 = 1.0;  ///< initial capital
  int T = 0;        ///< final period index

  /// Throws ConfigError unless a, k0 > 0, 0 < b <= 1 and T >= 0.
  void validate() const;
};

/// c_t = b^t (1-b) a^(t+1) k0 / (1 - b^(T+1)); a^(t+1) k0 / (T+1) when b = 1.
std::vector<double> cake_closed_form(const CakeParams& cp);

/// Bellman recursion: c_t = a k_t / (1 + b + ... + b^(T-t)), simulated
/// forward from k0.
std::vector<double> cake_backward_induction(const CakeParams& cp);

/// k_0 .. k_{T+1} implied by a consumption schedule.
std::vector<double> cake_capital_path(const CakeParams& cp, std::span<const double> consumption);

double cake_objective(const CakeParams& cp, std::span<const double> consumption);

struct CakeNlpResult {
  SolveStatus status = SolveStatus::IterationLimit;
  std::vector<double> consumption;
  std::vector<double> capital;  ///< k_0 .. k_{T+1}
  double objective = 0.0;
  double max_relative_error = 0.0;  ///< against cake_closed_form
  double objective_error = 0.0;
  int outer_iterations = 0;
  int inner_iterations = 0;
  std::string message;
};

/// Tolerances used by cake_via_nlp when none are given.
SolveOptions cake_solve_options();

/// Solves the problem with the augmented-Lagrangian solver from an equal
/// split start and compares against the closed form.
CakeNlpResult cake_via_nlp(const CakeParams& cp, const SolveOptions& options = cake_solve_options());

}  // namespace optpop
