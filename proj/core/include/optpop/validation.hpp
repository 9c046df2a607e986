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

#include <cstdint>
#include <string>
#include <vector>

#include "optpop/augmented_lagrangian.hpp"
#include "optpop/nlp_transcription.hpp"

namespace optpop {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   ///< worst observed discrepancy
  double tolerance = 0.0;
  std::string detail;
};

/// Savings rule satisfies u'(c) = beta (1+r) u'(d) on random (w, r) draws.
CheckResult check_euler_identity(const ScenarioParams& p, std::uint64_t seed, int draws = 200);

/// f(k) = f'(k) k + w/A over a log grid of k.
CheckResult check_zero_profit(const ScenarioParams& p);

/// Recursive G and H updates against their cumulative-sum forms on random
/// schedules of length <= 20.
CheckResult check_recursive_cumulative(const ScenarioParams& p, std::uint64_t seed, int draws = 50);

/// R_{T+1} = R_bar - theta sum H_t N_t on random forward simulations.
CheckResult check_stock_conservation(const ScenarioParams& p, std::uint64_t seed, int draws = 20);

/// Permutation, scaling and tie invariance of the Gini index.
CheckResult check_gini_invariance(std::uint64_t seed, int draws = 50);

/// Analytic weighted gradients against central differences at steps h and
/// h/2, at random interior points of `problem`, with random constraint
/// weights.
CheckResult check_gradient(const NlpProblem& problem, std::uint64_t seed, int points = 3);

/// Solves `problem` and checks status, KKT residuals and complementarity
/// of the critical-level rows.
CheckResult check_kkt(const NlpProblem& problem, const SolveOptions& options);

/// Closed form against backward induction on random parameters.
CheckResult check_cake_recursion(std::uint64_t seed, int draws = 20);

/// Solver against the closed form on random parameters with T <= 10.
CheckResult check_cake_nlp(std::uint64_t seed, int draws = 10);

struct ValidationOptions {
  std::uint64_t seed = 20260115;
};

/// Every check above on the built-in scenarios.
std::vector<CheckResult> run_validation_suite(const ValidationOptions& options = {});

}  // namespace optpop
