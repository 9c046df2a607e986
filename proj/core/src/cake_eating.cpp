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

#include "optpop/cake_eating.hpp"

#include <algorithm>
#include <cmath>

#include "optpop/errors.hpp"
#include "optpop/smooth_problem.hpp"

namespace optpop {

void CakeParams::validate() const {
  if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("cake: a must be positive");
  if (!(b > 0.0 && b <= 1.0)) throw ConfigError("cake: b must lie in (0, 1]");
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw ConfigError("cake: k0 must be positive");
  if (T < 0) throw ConfigError("cake: T must be non-negative");
}

std::vector<double> cake_closed_form(const CakeParams& cp) {
  cp.validate();
  std::vector<double> c(static_cast<std::size_t>(cp.T) + 1);
  for (int t = 0; t <= cp.T; ++t) {
    const double grown = std::pow(cp.a, t + 1) * cp.k0;
    if (cp.b == 1.0) {
      c[t] = grown / (cp.T + 1);
    } else {
      c[t] = std::pow(cp.b, t) * (1.0 - cp.b) * grown / (1.0 - std::pow(cp.b, cp.T + 1));
    }
  }
  return c;
}

std::vector<double> cake_backward_induction(const CakeParams& cp) {
  cp.validate();
  // V_t(k) = D_t ln k + const with D_T = 1, D_t = 1 + b D_{t+1}; the
  // first-order condition gives c_t = a k_t / D_t.
  std::vector<double> D(static_cast<std::size_t>(cp.T) + 1);
  D[cp.T] = 1.0;
  for (int t = cp.T - 1; t >= 0; --t) D[t] = 1.0 + cp.b * D[t + 1];
  std::vector<double> c(D.size());
  double k = cp.k0;
  for (int t = 0; t <= cp.T; ++t) {
    c[t] = cp.a * k / D[t];
    k = cp.a * k - c[t];
  }
  return c;
}

std::vector<double> cake_capital_path(const CakeParams& cp, std::span<const double> consumption) {
  std::vector<double> k{cp.k0};
  for (double c : consumption) k.push_back(cp.a * k.back() - c);
  return k;
}

double cake_objective(const CakeParams& cp, std::span<const double> consumption) {
  double v = 0.0, disc = 1.0;
  for (double c : consumption) {
    if (!(c > 0.0)) throw DomainError("cake: consumption must be positive");
    v += disc * std::log(c);
    disc *= cp.b;
  }
  return v;
}

namespace {

// x = [c_0 .. c_T, k_1 .. k_T]; row t: k_{t+1} - a k_t + c_t = 0 with
// k_0 fixed and k_{T+1} = 0.
class CakeProblem final : public SmoothProblem {
 public:
  explicit CakeProblem(const CakeParams& cp) : cp_(cp), n_c_(static_cast<std::size_t>(cp.T) + 1) {
    const std::size_t n = n_c_ + static_cast<std::size_t>(cp.T);
    lower_.assign(n, 0.0);
    upper_.assign(n, 1e12);
    for (std::size_t i = 0; i < n_c_; ++i) lower_[i] = 1e-12;
  }

  std::size_t num_variables() const override { return lower_.size(); }
  std::size_t num_equalities() const override { return n_c_; }
  std::size_t num_inequalities() const override { return 0; }
  std::span<const double> lower_bounds() const override { return lower_; }
  std::span<const double> upper_bounds() const override { return upper_; }

  void evaluate(std::span<const double> x, Evaluation& out) const override {
    out.equalities.resize(n_c_);
    out.inequalities.clear();
    double f = 0.0, disc = 1.0;
    for (std::size_t t = 0; t < n_c_; ++t) {
      if (!(x[t] > 0.0)) throw DomainError("cake: consumption must be positive", static_cast<int>(t) + 1);
      f -= disc * std::log(x[t]);
      disc *= cp_.b;
      out.equalities[t] = capital(x, t + 1) - cp_.a * capital(x, t) + x[t];
    }
    out.objective = f;
  }

  void weighted_gradient(std::span<const double> x, double w_obj, std::span<const double> w_eq,
                         std::span<const double>, std::span<double> grad) const override {
    std::fill(grad.begin(), grad.end(), 0.0);
    double disc = 1.0;
    for (std::size_t t = 0; t < n_c_; ++t) {
      grad[t] = -w_obj * disc / x[t] + w_eq[t];
      disc *= cp_.b;
      if (t + 1 < n_c_) grad[n_c_ + t] += w_eq[t];  // k_{t+1}
      if (t >= 1) grad[n_c_ + t - 1] -= cp_.a * w_eq[t];  // k_t
    }
  }

 private:
  double capital(std::span<const double> x, std::size_t t) const {
    if (t == 0) return cp_.k0;
    if (t == n_c_) return 0.0;
    return x[n_c_ + t - 1];
  }

  CakeParams cp_;
  std::size_t n_c_;
  std::vector<double> lower_, upper_;
};

}  // namespace

SolveOptions cake_solve_options() {
  SolveOptions o;
  o.equality_tolerance = 1e-9;
  o.stationarity_tolerance = 1e-7;
  o.multistart_count = 1;
  return o;
}

CakeNlpResult cake_via_nlp(const CakeParams& cp, const SolveOptions& options) {
  cp.validate();
  if (cp.T > 20) throw ConfigError("cake_via_nlp: T must be at most 20");
  const CakeProblem problem(cp);

  // Constant consumption, capital simulated without the terminal condition.
  const std::size_t m = static_cast<std::size_t>(cp.T) + 1;
  std::vector<double> x0(problem.num_variables());
  double k = cp.k0;
  for (std::size_t t = 0; t < m; ++t) {
    x0[t] = cp.k0 / static_cast<double>(m);
    k = std::max(cp.a * k - x0[t], 0.0);
    if (t + 1 < m) x0[m + t] = k;
  }

  const auto al = augmented_lagrangian(problem, std::move(x0), options);
  CakeNlpResult r;
  r.status = al.status;
  r.outer_iterations = al.outer_iterations;
  r.inner_iterations = al.inner_iterations;
  r.message = al.message;
  r.consumption.assign(al.x.begin(), al.x.begin() + static_cast<std::ptrdiff_t>(m));
  r.capital = cake_capital_path(cp, r.consumption);
  r.objective = cake_objective(cp, r.consumption);
  const auto exact = cake_closed_form(cp);
  for (std::size_t t = 0; t < m; ++t) {
    r.max_relative_error = std::max(r.max_relative_error, std::abs(r.consumption[t] - exact[t]) / exact[t]);
  }
  r.objective_error = std::abs(r.objective - cake_objective(cp, exact));
  return r;
}

}  // namespace optpop
