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

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "optpop/olg_model.hpp"
#include "optpop/scenario.hpp"
#include "optpop/smooth_problem.hpp"

namespace optpop {

enum class Objective { Utilitarian, Maximin };

std::string_view to_string(Objective objective);
std::optional<Objective> parse_objective(std::string_view name);

enum class DerivativeMode { Analytic, CentralDifference };

/// Fixed-horizon planning problem.
///
/// Decision vector layout (T = horizon):
///   [0, T-1)        N_2 .. N_T
///   [T-1, 2T-2)     k_2 .. k_T
///   [2T-2]          u_min            (Maximin only)
///
/// N_1 and k_1 are fixed by the scenario. G, H, A and R are closed-form in
/// the populations and are recomputed on every evaluation.
///
/// Equalities: T-1 capital-transition residuals, then R_T - theta H_T N_T.
/// Inequalities: u_t - mu (T), (1+omega) N_t - N_{t+1} (T-1), and for
/// Maximin u_t - u_min (T).
///
/// The SmoothProblem view minimises the negated welfare.
class NlpProblem final : public SmoothProblem {
 public:
  NlpProblem(ScenarioParams params, int horizon, Objective objective,
             DerivativeMode mode = DerivativeMode::Analytic);

  int horizon() const noexcept { return T_; }
  Objective objective() const noexcept { return objective_; }
  const ScenarioParams& params() const noexcept { return params_; }
  DerivativeMode derivative_mode() const noexcept { return mode_; }
  void set_derivative_mode(DerivativeMode mode) noexcept { mode_ = mode; }

  std::size_t population_index(int t) const;
  std::size_t capital_index(int t) const;
  std::size_t min_utility_index() const;

  std::size_t terminal_constraint_index() const noexcept { return static_cast<std::size_t>(T_ - 1); }
  std::size_t growth_offset() const noexcept { return static_cast<std::size_t>(T_); }
  std::size_t epigraph_offset() const noexcept { return static_cast<std::size_t>(2 * T_ - 1); }

  std::size_t num_variables() const override { return lower_.size(); }
  std::size_t num_equalities() const override { return static_cast<std::size_t>(T_); }
  std::size_t num_inequalities() const override;
  std::span<const double> lower_bounds() const override { return lower_; }
  std::span<const double> upper_bounds() const override { return upper_; }

  void evaluate(std::span<const double> x, Evaluation& out) const override;
  void weighted_gradient(std::span<const double> x, double w_obj, std::span<const double> w_eq,
                         std::span<const double> w_ineq, std::span<double> grad) const override;
  void jacobian(std::span<const double> x, std::span<double> out) const override;

  /// Social welfare (to be maximised): sum u_t N_t, or u_min for Maximin.
  double welfare(std::span<const double> x) const;
  std::vector<double> welfare_gradient(std::span<const double> x) const;

  /// Full schedules including the fixed first period.
  std::vector<double> populations(std::span<const double> x) const;
  std::vector<double> capitals(std::span<const double> x) const;
  std::vector<double> utilities(std::span<const double> x) const;

  Trajectory trajectory(std::span<const double> x) const;

  /// Inverse of trajectory(): packs N_2..N_T, k_2..k_T (and u_min = min u).
  std::vector<double> pack(std::span<const double> N, std::span<const double> k) const;

  /// Mutation hook for the derivative self-checks: scales capital-residual
  /// values (not their derivatives) by `sign`. Never set outside tests.
  void set_residual_sign_for_testing(double sign) noexcept { residual_sign_ = sign; }

 private:
  void analytic_gradient(std::span<const double> x, double w_obj, std::span<const double> w_eq,
                         std::span<const double> w_ineq, std::span<double> grad) const;

  ScenarioParams params_;
  int T_;
  Objective objective_;
  DerivativeMode mode_;
  std::vector<double> lower_;
  std::vector<double> upper_;
  double residual_sign_ = 1.0;
};

NlpProblem build_problem(const ScenarioParams& params, int horizon, Objective objective,
                         DerivativeMode mode = DerivativeMode::Analytic);

struct FlatStart {};

/// Warm start from a solved trajectory of a neighbouring horizon.
struct WarmStart {
  const Trajectory* prior = nullptr;
};

using StartStrategy = std::variant<FlatStart, WarmStart>;

struct InitialGuess {
  std::vector<double> x;
  bool fell_back_to_flat = false;
  std::string note;
};

/// Flat: N_t = N_1, k_t simulated with n = 0, u_min = mu.
/// WarmStart: copy the prior schedule, repeat its last period to fill the
/// horizon, scale the populations so the reserve is exactly exhausted, then
/// re-simulate capital. Falls back to Flat if no admissible scaling exists.
InitialGuess initial_guess(const NlpProblem& problem, const StartStrategy& strategy);

/// Scales N_2..N_T by a common factor (clamped to the population bounds)
/// so that the depletion residual vanishes. Returns false if the bounds
/// make that impossible.
bool scale_to_depletion(const NlpProblem& problem, std::vector<double>& N);

}  // namespace optpop
