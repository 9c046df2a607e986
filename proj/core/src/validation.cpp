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

#include "optpop/validation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "optpop/analysis.hpp"
#include "optpop/cake_eating.hpp"
#include "optpop/errors.hpp"
#include "optpop/solver.hpp"

namespace optpop {

namespace {

class Draws {
 public:
  explicit Draws(std::uint64_t seed) : engine_(seed) {}
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }
  int integer(int lo, int hi) { return lo + static_cast<int>(engine_() % static_cast<std::uint64_t>(hi - lo + 1)); }
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[engine_() % i]);
  }

 private:
  std::mt19937_64 engine_;
};

double rel(double a, double b) { return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b))); }

CheckResult verdict(std::string name, double measured, double tolerance, std::string detail = {}) {
  CheckResult r;
  r.name = std::move(name);
  r.measured = measured;
  r.tolerance = tolerance;
  r.passed = std::isfinite(measured) && measured <= tolerance;
  r.detail = std::move(detail);
  return r;
}

CheckResult failure(std::string name, double tolerance, std::string detail) {
  CheckResult r;
  r.name = std::move(name);
  r.measured = std::numeric_limits<double>::infinity();
  r.tolerance = tolerance;
  r.detail = std::move(detail);
  return r;
}

std::string label(const NlpProblem& problem) {
  std::ostringstream s;
  s << to_string(problem.objective()) << "/T=" << problem.horizon();
  return s.str();
}

}  // namespace

CheckResult check_euler_identity(const ScenarioParams& p, std::uint64_t seed, int draws) {
  Draws rng(seed);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    const double w = rng.uniform(0.05, 3.0);
    const double r = rng.uniform(-0.6, 3.0);
    const double s = savings_rule(w, r, p);
    const double lhs = std::pow(w - s, -p.gamma());
    const double rhs = p.beta() * (1.0 + r) * std::pow((1.0 + r) * s, -p.gamma());
    worst = std::max(worst, std::abs(lhs - rhs) / std::abs(lhs));
  }
  return verdict("euler-identity", worst, 1e-12);
}

CheckResult check_zero_profit(const ScenarioParams& p) {
  double worst = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double k = std::pow(10.0, -4.0 + 8.0 * i / 200.0);
    const double A = 1.0 + 0.01 * i;
    const double f = std::pow(k, p.alpha());
    const double fprime = p.alpha() * std::pow(k, p.alpha() - 1.0);
    worst = std::max(worst, std::abs(f - (fprime * k + wage(k, A, p) / A)) / f);
  }
  return verdict("zero-profit", worst, 1e-12);
}

CheckResult check_recursive_cumulative(const ScenarioParams& p, std::uint64_t seed, int draws) {
  Draws rng(seed);
  double worst = 0.0;
  const double cap = std::min(p.population_cap(), 10.0);
  for (int i = 0; i < draws; ++i) {
    const int T = rng.integer(1, 20);
    StockState s{p.G1(), p.H1(), p.G1() * p.H1(), p.R_bar(), false};
    double sum_g = 0.0, sum_h = 0.0;
    for (int t = 0; t < T; ++t) {
      const double N = rng.uniform(p.lambda_pop(), cap);
      sum_g += s.G * N;
      sum_h += s.H * N;
      s = state_update(s, N, p);
      worst = std::max(worst, rel(s.G, p.G1() + p.sigma() * sum_g));
      worst = std::max(worst, rel(s.H, p.H1() - p.rho() * sum_h));
      worst = std::max(worst, rel(s.A, s.G * s.H));
    }
  }
  return verdict("recursive-cumulative", worst, 1e-12);
}

CheckResult check_stock_conservation(const ScenarioParams& p, std::uint64_t seed, int draws) {
  Draws rng(seed);
  double worst = 0.0;
  int done = 0, attempts = 0;
  while (done < draws && attempts < 20 * draws) {
    ++attempts;
    const int T = rng.integer(2, 30);
    std::vector<double> n(static_cast<std::size_t>(T - 1));
    double N = p.N1();
    for (auto& v : n) {
      v = rng.uniform(-0.3, 0.3);
      N *= 1.0 + v;
    }
    try {
      const auto traj = forward_simulate(n, p, T);
      double used = 0.0;
      for (const auto& g : traj.generations) used += p.theta() * g.H * g.N;
      worst = std::max(worst, std::abs(traj.terminal_reserve - (p.R_bar() - used)));
      const auto inv = check_invariants(traj, p);
      if (!inv.ok) return failure("stock-conservation", 1e-10, "trajectory invariant: " + inv.first_failure);
      ++done;
    } catch (const std::exception&) {
      // Draw left the model domain; redraw.
    }
  }
  if (done < draws) return failure("stock-conservation", 1e-10, "too few admissible random schedules");
  return verdict("stock-conservation", worst, 1e-10);
}

CheckResult check_gini_invariance(std::uint64_t seed, int draws) {
  Draws rng(seed);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    const int m = rng.integer(2, 60);
    std::vector<double> N(m), u(m);
    for (int j = 0; j < m; ++j) {
      N[j] = rng.uniform(0.1, 5.0);
      // Roughly a third of the draws share one of three utility levels.
      u[j] = rng.uniform(0.0, 1.0) < 0.3 ? 1.0 + 0.5 * rng.integer(0, 2) : rng.uniform(1.0, 3.0);
    }
    const double g0 = gini(N, u);
    if (!(g0 >= 0.0 && g0 < 1.0)) return failure("gini-invariance", 1e-12, "index outside [0, 1)");

    std::vector<std::size_t> order(m);
    for (int j = 0; j < m; ++j) order[j] = j;
    rng.shuffle(order);
    std::vector<double> Np(m), up(m);
    for (int j = 0; j < m; ++j) {
      Np[j] = N[order[j]];
      up[j] = u[order[j]];
    }
    if (gini(Np, up) != g0) return failure("gini-invariance", 0.0, "permutation changed the index");

    const double c = rng.uniform(0.1, 10.0);
    std::vector<double> Nc(N), uc(u);
    for (auto& v : Nc) v *= c;
    for (auto& v : uc) v *= c;
    worst = std::max(worst, std::abs(gini(Nc, u) - g0));
    worst = std::max(worst, std::abs(gini(N, uc) - g0));
  }
  return verdict("gini-invariance", worst, 1e-12);
}

CheckResult check_gradient(const NlpProblem& problem, std::uint64_t seed, int points) {
  const std::string name = "gradient-richardson[" + label(problem) + "]";
  Draws rng(seed);
  const std::size_t n = problem.num_variables();
  std::vector<double> w_eq(problem.num_equalities()), w_ineq(problem.num_inequalities());
  std::vector<double> analytic(n), h1(n), h2(n);
  double worst = 0.0;
  for (int k = 0; k < points; ++k) {
    const auto x = multistart_point(problem, k + 1, seed);
    for (auto& v : w_eq) v = rng.uniform(-1.0, 1.0);
    for (auto& v : w_ineq) v = rng.uniform(-1.0, 1.0);
    try {
      problem.weighted_gradient(x, 1.0, w_eq, w_ineq, analytic);
      central_difference_gradient(problem, x, 1.0, w_eq, w_ineq, h1, 1.0);
      central_difference_gradient(problem, x, 1.0, w_eq, w_ineq, h2, 0.5);
    } catch (const std::exception& e) {
      return failure(name, 1e-4, e.what());
    }
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) scale = std::max(scale, std::abs(h2[i]));
    for (std::size_t i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(h1[i] - h2[i]) / scale);
      worst = std::max(worst, std::abs(analytic[i] - h2[i]) / scale);
    }
  }
  return verdict(name, worst, 1e-4);
}

CheckResult check_kkt(const NlpProblem& problem, const SolveOptions& options) {
  const std::string name = "kkt[" + label(problem) + "]";
  const auto rep = solve_from(problem, multistart_point(problem, 0, options.seed), options);
  if (!rep.optimal()) return failure(name, options.stationarity_tolerance, "solver status " + std::string(to_string(rep.status)));
  const auto kkt = kkt_residuals(problem, rep.x, rep.eq_multipliers, rep.ineq_multipliers);
  std::ostringstream detail;
  detail << "stationarity " << kkt.stationarity << ", feasibility " << kkt.feasibility;
  if (kkt.feasibility > options.equality_tolerance) return failure(name, options.equality_tolerance, detail.str());
  const auto inv = check_invariants(rep.trajectory, problem.params(), 1e-6, true);
  if (!inv.ok) return failure(name, 1e-6, "trajectory invariant: " + inv.first_failure);

  // Critical-level rows with slack must carry no multiplier.
  Evaluation ev;
  problem.evaluate(rep.x, ev);
  double slack_multiplier = 0.0;
  for (int t = 0; t < problem.horizon(); ++t) {
    if (ev.inequalities[t] > 1e-6) slack_multiplier = std::max(slack_multiplier, std::abs(rep.ineq_multipliers[t]));
  }
  if (slack_multiplier > 1e-8) {
    detail << ", multiplier " << slack_multiplier << " on an inactive critical-level row";
    return failure(name, 1e-8, detail.str());
  }
  if (problem.objective() == Objective::Maximin) {
    const double gap = std::abs(rep.objective - rep.epigraph_value);
    if (gap > 1e-6) return failure(name, 1e-6, "min u differs from u_min");
  }
  return verdict(name, kkt.stationarity, options.stationarity_tolerance, detail.str());
}

CheckResult check_cake_recursion(std::uint64_t seed, int draws) {
  Draws rng(seed);
  double worst = 0.0, budget = 0.0;
  for (int i = 0; i < draws; ++i) {
    CakeParams cp;
    cp.a = rng.uniform(0.8, 1.3);
    cp.b = i % 5 == 0 ? 1.0 : rng.uniform(0.3, 1.0);
    cp.k0 = rng.uniform(0.2, 5.0);
    cp.T = rng.integer(0, 30);
    const auto closed = cake_closed_form(cp);
    const auto backward = cake_backward_induction(cp);
    for (std::size_t t = 0; t < closed.size(); ++t) {
      worst = std::max(worst, std::abs(closed[t] - backward[t]) / closed[t]);
    }
    const auto k = cake_capital_path(cp, closed);
    budget = std::max(budget, std::abs(k.back()) / (std::pow(cp.a, cp.T + 1) * cp.k0));
  }
  std::ostringstream detail;
  detail << "terminal capital " << budget;
  if (budget > 1e-10) return failure("cake-closed-vs-backward", 1e-12, detail.str());
  return verdict("cake-closed-vs-backward", worst, 1e-12, detail.str());
}

CheckResult check_cake_nlp(std::uint64_t seed, int draws) {
  Draws rng(seed);
  double worst = 0.0;
  for (int i = 0; i < draws; ++i) {
    CakeParams cp;
    cp.a = rng.uniform(0.9, 1.2);
    cp.b = i % 4 == 0 ? 1.0 : rng.uniform(0.8, 1.0);
    cp.k0 = rng.uniform(0.5, 2.0);
    cp.T = rng.integer(1, 10);
    const auto r = cake_via_nlp(cp);
    if (r.status != SolveStatus::Optimal) {
      std::ostringstream detail;
      detail << "draw " << i << " (a=" << cp.a << ", b=" << cp.b << ", T=" << cp.T << "): " << r.message;
      return failure("cake-nlp-vs-closed", 1e-6, detail.str());
    }
    worst = std::max(worst, r.max_relative_error);
  }
  return verdict("cake-nlp-vs-closed", worst, 1e-6);
}

std::vector<CheckResult> run_validation_suite(const ValidationOptions& options) {
  const auto a = scenario_a();
  const auto b = scenario_b();
  const auto seed = options.seed;
  std::vector<CheckResult> out;
  auto tagged = [](CheckResult r, const char* scenario) {
    r.name += std::string("[") + scenario + "]";
    return r;
  };
  out.push_back(tagged(check_euler_identity(a, seed), "a"));
  out.push_back(tagged(check_zero_profit(a), "a"));
  out.push_back(tagged(check_recursive_cumulative(a, seed), "a"));
  out.push_back(tagged(check_recursive_cumulative(b, seed + 1), "b"));
  out.push_back(tagged(check_stock_conservation(a, seed), "a"));
  out.push_back(tagged(check_stock_conservation(b, seed + 1), "b"));
  out.push_back(check_gini_invariance(seed));
  out.push_back(check_gradient(build_problem(a, 10, Objective::Utilitarian), seed));
  out.push_back(check_gradient(build_problem(a, 10, Objective::Maximin), seed));
  out.push_back(check_gradient(build_problem(b, 25, Objective::Utilitarian), seed));
  SolveOptions solve;
  solve.seed = seed;
  out.push_back(check_kkt(build_problem(a, 20, Objective::Utilitarian), solve));
  out.push_back(check_kkt(build_problem(a, 20, Objective::Maximin), solve));
  out.push_back(check_kkt(build_problem(b, 30, Objective::Maximin), solve));
  out.push_back(check_cake_recursion(seed));
  out.push_back(check_cake_nlp(seed));
  return out;
}

}  // namespace optpop
