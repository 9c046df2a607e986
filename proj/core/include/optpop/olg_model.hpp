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

#include "optpop/scenario.hpp"

namespace optpop {

/// Wage per worker: A (1 - alpha) k^alpha.
double wage(double k, double A, const ScenarioParams& p);

/// Return on saving realized when capital intensity is `k_next`:
/// alpha k^(alpha-1) - delta.
double rate_of_return(double k_next, const ScenarioParams& p);

/// Optimal CRRA saving out of wage `w` given next-period return `r_next`.
double savings_rule(double w, double r_next, const ScenarioParams& p);

/// Saving of the last generation, whose capital is only worth (1 - delta)
/// when old. Old-age consumption is then (1 - delta) * s.
double terminal_savings(double w, const ScenarioParams& p);

/// Two-period CRRA lifetime utility.
double lifetime_utility(double c, double d_old, const ScenarioParams& p);

/// Labour-productivity growth implied by a generation of size N:
/// (1 + sigma N)(1 - rho N) - 1.
double productivity_growth(double N, const ScenarioParams& p);

/// Energy efficiency, resource availability, productivity and remaining
/// reserve at the start of a period.
struct StockState {
  double G = 1.0;
  double H = 1.0;
  double A = 1.0;
  double R = 0.0;
  bool overdrawn = false;  ///< R fell below -1e-10: more energy used than remains
};

/// One generation's complete record. `n`, `a`, `r_next` and `d_old` refer
/// to the transition into the next period.
struct GenerationState {
  int t = 0;
  double N = 0.0;
  double n = 0.0;
  double k = 0.0;
  double A = 0.0;
  double G = 0.0;
  double H = 0.0;
  double R = 0.0;
  double a = 0.0;
  double w = 0.0;
  double r_next = 0.0;
  double s = 0.0;
  double c = 0.0;
  double d_old = 0.0;
  double u = 0.0;

  double energy() const noexcept { return A * N; }    ///< E = A N
  double resource() const noexcept { return H * N; }  ///< Z = H N
};

/// Advance the stocks by one period given the current population.
/// Throws DomainError if N < 0 or rho N >= 1. Over-extraction is flagged
/// through StockState::overdrawn, not thrown.
StockState state_update(const GenerationState& g, const ScenarioParams& p);
StockState state_update(const StockState& s, double N, const ScenarioParams& p);

/// Residual of the implicit capital transition between k_t and k_next for
/// productivity growth a_t and population growth n_t. Zero on the OLG path.
double capital_residual(double k_t, double k_next, double a_t, double n_t, const ScenarioParams& p);

struct RootOptions {
  double lower = 1e-7;
  double upper = 1e7;
  double tolerance = 1e-12;
  int max_iterations = 400;
};

/// Solves capital_residual(k_t, k_next, a_t, n_t) = 0 for k_next by
/// log-space bisection followed by safeguarded Newton polishing.
/// Throws InfeasibleTransition when the bracket has no sign change.
double solve_k_next(double k_t, double a_t, double n_t, const ScenarioParams& p, const RootOptions& opts = {});

/// Per-generation record for t = 1..T plus the terminal reserve R_{T+1}.
struct Trajectory {
  std::vector<GenerationState> generations;
  double terminal_reserve = 0.0;

  int horizon() const noexcept { return static_cast<int>(generations.size()); }
  std::vector<double> populations() const;
  std::vector<double> utilities() const;
};

/// Builds every derived quantity from a population schedule N_1..N_T and a
/// capital schedule k_1..k_T. The last generation uses terminal_savings.
/// The capital transition is not enforced here.
Trajectory evaluate_schedule(std::span<const double> N, std::span<const double> k, const ScenarioParams& p);

/// Single-shooting evaluation: N_{t+1} = (1 + n_t) N_t and k_{t+1} from
/// solve_k_next. `growth_rates` holds n_1..n_{T-1}.
Trajectory forward_simulate(std::span<const double> growth_rates, const ScenarioParams& p, int T,
                            const RootOptions& roots = {});

struct InvariantReport {
  bool ok = true;
  double max_violation = 0.0;
  std::string first_failure;
};

/// Checks the population, stock, productivity and monotone-reserve
/// identities of a trajectory. With `require_depletion`, R_{T+1} must also
/// vanish within `tolerance`.
InvariantReport check_invariants(const Trajectory& traj, const ScenarioParams& p, double tolerance = 1e-10,
                                 bool require_depletion = false);

}  // namespace optpop
