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

#include "optpop/steady_state.hpp"

#include <cmath>

#include "optpop/errors.hpp"
#include "optpop/olg_model.hpp"

namespace optpop {

double steady_state_n(double k, const ScenarioParams& p) {
  if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("steady_state_n: capital intensity must be positive");
  const double al = p.alpha();
  const double kpow = std::pow(k, al);
  const double q = 1.0 + al * kpow / k - p.delta();
  if (!(q > 0.0)) throw DomainError("steady_state_n: gross return must be positive");
  const double saved = (1.0 - al) * kpow / (1.0 + p.impatience() * std::pow(q, (p.gamma() - 1.0) / p.gamma()));
  return saved * q / (al * kpow) - 1.0;
}

double steady_state_utility(double k, const ScenarioParams& p) {
  const double A = p.G1() * p.H1();
  const double w = wage(k, A, p);
  const double r = rate_of_return(k, p);
  const double s = savings_rule(w, r, p);
  return lifetime_utility(w - s, (1.0 + r) * s, p);
}

namespace {

std::vector<double> log_grid(const SteadyStateGrid& grid) {
  if (!(grid.k_min > 0.0) || !(grid.k_max > grid.k_min) || grid.points < 3) {
    throw DomainError("steady-state grid needs 0 < k_min < k_max and at least 3 points");
  }
  std::vector<double> k(grid.points);
  const double lo = std::log(grid.k_min);
  const double step = (std::log(grid.k_max) - lo) / (grid.points - 1);
  for (int i = 0; i < grid.points; ++i) k[i] = std::exp(lo + step * i);
  k.front() = grid.k_min;
  k.back() = grid.k_max;
  return k;
}

}  // namespace

SteadyStateSeries steady_state_series(const ScenarioParams& p, const SteadyStateGrid& grid) {
  SteadyStateSeries out;
  out.k = log_grid(grid);
  out.n.reserve(out.k.size());
  out.u.reserve(out.k.size());
  for (double k : out.k) {
    out.n.push_back(steady_state_n(k, p));
    out.u.push_back(steady_state_utility(k, p));
  }
  return out;
}

FertilityMinimum find_min_utility_fertility(const ScenarioParams& p, const SteadyStateGrid& grid) {
  const auto k = log_grid(grid);
  std::size_t best = 0;
  double best_u = steady_state_utility(k[0], p);
  for (std::size_t i = 1; i < k.size(); ++i) {
    const double u = steady_state_utility(k[i], p);
    if (u < best_u) {
      best_u = u;
      best = i;
    }
  }
  if (best == 0 || best + 1 == k.size()) {
    throw DomainError("no interior utility minimum on the k grid; widen [k_min, k_max]");
  }

  // Golden-section search on the bracketing grid cell pair.
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = k[best - 1];
  double b = k[best + 1];
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = steady_state_utility(c, p);
  double fd = steady_state_utility(d, p);
  while (b - a > grid.tolerance * 1e-3) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = steady_state_utility(c, p);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = steady_state_utility(d, p);
    }
  }
  FertilityMinimum out;
  out.k = 0.5 * (a + b);
  out.u = steady_state_utility(out.k, p);
  if (best_u < out.u) {
    out.k = k[best];
    out.u = best_u;
  }
  out.n = steady_state_n(out.k, p);
  return out;
}

}  // namespace optpop
