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

#include "optpop/projected_quasi_newton.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

namespace optpop {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

extern "C" {
void dpotrf_(const char* uplo, const int* n, double* a, const int* lda, int* info);
void dpotrs_(const char* uplo, const int* n, const int* nrhs, const double* a, const int* lda, double* b,
             const int* ldb, int* info);
}

// In-place Cholesky of a symmetric m x m matrix stored densely.
bool cholesky(std::vector<double>& a, std::size_t m) {
  if (m == 0) return true;
  const int dim = static_cast<int>(m);
  int info = 0;
  dpotrf_("L", &dim, a.data(), &dim, &info);
  if (info != 0) return false;
  for (std::size_t i = 0; i < m; ++i) {
    if (!std::isfinite(a[i * m + i])) return false;
  }
  return true;
}

void cholesky_solve(const std::vector<double>& l, std::size_t m, std::vector<double>& b) {
  if (m == 0) return;
  const int dim = static_cast<int>(m);
  const int one = 1;
  int info = 0;
  dpotrs_("L", &dim, &one, l.data(), &dim, b.data(), &dim, &info);
}

struct MeritPoint {
  double value = std::numeric_limits<double>::infinity();
  Evaluation ev;
  std::vector<double> grad;
  std::vector<double> w_eq;
  std::vector<double> w_ineq;
};

double weights_and_value(const MeritTerms& terms, const Evaluation& ev, std::span<double> w_eq,
                         std::span<double> w_ineq) {
  const double rho = terms.penalty;
  double v = ev.objective;
  for (std::size_t i = 0; i < ev.equalities.size(); ++i) {
    const double c = ev.equalities[i];
    const double lam = terms.eq_multipliers[i];
    v += -lam * c + 0.5 * rho * c * c;
    w_eq[i] = -(lam - rho * c);
  }
  for (std::size_t j = 0; j < ev.inequalities.size(); ++j) {
    const double z = terms.ineq_multipliers[j];
    const double shifted = std::max(0.0, z - rho * ev.inequalities[j]);
    v += (shifted * shifted - z * z) / (2.0 * rho);
    w_ineq[j] = -shifted;
  }
  return v;
}

bool evaluate_point(const SmoothProblem& problem, const MeritTerms& terms, std::span<const double> x,
                    MeritPoint& pt) {
  pt.grad.resize(x.size());
  pt.w_eq.resize(problem.num_equalities());
  pt.w_ineq.resize(problem.num_inequalities());
  try {
    problem.evaluate(x, pt.ev);
    pt.value = weights_and_value(terms, pt.ev, pt.w_eq, pt.w_ineq);
    if (!std::isfinite(pt.value)) {
      pt.value = std::numeric_limits<double>::infinity();
      return false;
    }
    problem.weighted_gradient(x, 1.0, pt.w_eq, pt.w_ineq, pt.grad);
  } catch (const std::exception&) {
    pt.value = std::numeric_limits<double>::infinity();
    return false;
  }
  return true;
}

}  // namespace

double projected_gradient_norm(std::span<const double> x, std::span<const double> g, std::span<const double> lower,
                               std::span<const double> upper) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double moved = std::clamp(x[i] - g[i], lower[i], upper[i]);
    m = std::max(m, std::abs(moved - x[i]));
  }
  return m;
}

double merit_value(const SmoothProblem& problem, const MeritTerms& terms, std::span<const double> x,
                   std::span<double> grad) {
  Evaluation ev;
  problem.evaluate(x, ev);
  std::vector<double> w_eq(ev.equalities.size()), w_ineq(ev.inequalities.size());
  const double v = weights_and_value(terms, ev, w_eq, w_ineq);
  if (!grad.empty()) problem.weighted_gradient(x, 1.0, w_eq, w_ineq, grad);
  return v;
}

std::vector<double> least_squares_multipliers(const SmoothProblem& problem, std::span<const double> x,
                                              std::span<const double> ineq_multipliers) {
  const std::size_t n = problem.num_variables();
  const std::size_t me = problem.num_equalities();
  const std::size_t mi = problem.num_inequalities();
  std::vector<double> lam(me, 0.0);
  if (me == 0) return lam;
  const auto jac = dense_jacobian(problem, x);
  std::vector<double> grad(n), none_eq(me, 0.0), w_ineq(mi, 0.0);
  for (std::size_t j = 0; j < ineq_multipliers.size() && j < mi; ++j) w_ineq[j] = -ineq_multipliers[j];
  problem.weighted_gradient(x, 1.0, none_eq, w_ineq, grad);

  const auto lower = problem.lower_bounds();
  const auto upper = problem.upper_bounds();
  std::vector<std::size_t> inside;
  for (std::size_t i = 0; i < n; ++i) {
    const double margin = 1e-12 * std::max(1.0, std::abs(x[i]));
    if (x[i] > lower[i] + margin && x[i] < upper[i] - margin) inside.push_back(i);
  }

  std::vector<double> normal(me * me, 0.0);
  double max_diag = 0.0;
  for (std::size_t a = 0; a < me; ++a) {
    const double* ra = jac.data() + a * n;
    for (std::size_t b = 0; b <= a; ++b) {
      const double* rb = jac.data() + b * n;
      double v = 0.0;
      for (std::size_t i : inside) v += ra[i] * rb[i];
      normal[a * me + b] = v;
      normal[b * me + a] = v;
    }
    max_diag = std::max(max_diag, normal[a * me + a]);
    double v = 0.0;
    for (std::size_t i : inside) v += ra[i] * grad[i];
    lam[a] = v;
  }
  std::vector<double> factor = normal;
  double shift = 1e-12 * std::max(1.0, max_diag);
  for (std::size_t a = 0; a < me; ++a) factor[a * me + a] += shift;
  bool factored = cholesky(factor, me);
  while (!factored && shift < 1e30) {
    shift *= 10.0;
    factor = normal;
    for (std::size_t a = 0; a < me; ++a) factor[a * me + a] += shift;
    factored = cholesky(factor, me);
  }
  if (!factored) return std::vector<double>(me, 0.0);
  cholesky_solve(factor, me, lam);
  for (double& v : lam) {
    if (!std::isfinite(v)) v = 0.0;
    v = std::clamp(v, -1e6, 1e6);
  }
  return lam;
}

InnerResult minimize_merit(const SmoothProblem& problem, const MeritTerms& terms, std::vector<double>& x,
                           std::vector<double>& lagrangian_hessian, const InnerOptions& options) {
  const std::size_t n = problem.num_variables();
  const std::size_t me = problem.num_equalities();
  const std::size_t mi = problem.num_inequalities();
  const auto lower = problem.lower_bounds();
  const auto upper = problem.upper_bounds();
  for (std::size_t i = 0; i < n; ++i) x[i] = std::clamp(x[i], lower[i], upper[i]);

  auto& B = lagrangian_hessian;
  bool fresh = B.size() != n * n;
  auto reset_identity = [&](double scale) {
    B.assign(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) B[i * n + i] = scale;
  };
  if (fresh) reset_identity(1.0);

  InnerResult res;
  MeritPoint cur, trial;
  ++res.evaluations;
  if (!evaluate_point(problem, terms, x, cur)) {
    res.evaluation_failed = true;
    res.value = cur.value;
    return res;
  }
  std::vector<double> jac = dense_jacobian(problem, x);

  std::vector<double> x_trial(n), d(n), h, rhs, equil, factor, first_pass, s(n), y(n), bs(n), g_old_weights(n);
  std::vector<std::size_t> free_idx, nonzero;
  std::vector<char> in_model;
  int flat_steps = 0;
  double radius = options.initial_radius;

  for (res.iterations = 0; res.iterations < options.max_iterations; ++res.iterations) {
    res.projected_gradient = projected_gradient_norm(x, cur.grad, lower, upper);
    if (res.projected_gradient <= options.tolerance) {
      res.converged = true;
      break;
    }

    const double eps = std::min(options.active_margin, res.projected_gradient);
    free_idx.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const bool at_lower = x[i] <= lower[i] + eps && cur.grad[i] > 0.0;
      const bool at_upper = x[i] >= upper[i] - eps && cur.grad[i] < 0.0;
      if (!(at_lower || at_upper)) free_idx.push_back(i);
    }
    const std::size_t m = free_idx.size();

    // Semismooth Newton on the piecewise-quadratic model: an inequality row
    // contributes while z - rho (c + J d) > 0 along the linearised step.
    const double rho = terms.penalty;
    auto gap = [&](std::size_t j) { return terms.ineq_multipliers[j] / rho - cur.ev.inequalities[j]; };
    auto row_dot_d = [&](std::size_t r) {
      const double* row = jac.data() + r * n;
      double v = 0.0;
      for (std::size_t a = 0; a < m; ++a) v += row[free_idx[a]] * rhs[a];
      return v;
    };
    auto newton_direction = [&]() {
      h.assign(m * m, 0.0);
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) h[a * m + b] = B[free_idx[a] * n + free_idx[b]];
      }
      rhs.resize(m);
      for (std::size_t a = 0; a < m; ++a) rhs[a] = -cur.grad[free_idx[a]];
      for (std::size_t r = 0; r < me + mi; ++r) {
        const bool active_now = r < me || cur.w_ineq[r - me] != 0.0;
        const bool modelled = r < me || in_model[r - me];
        if (!active_now && !modelled) continue;
        const double* row = jac.data() + r * n;
        nonzero.clear();
        for (std::size_t a = 0; a < m; ++a) {
          if (row[free_idx[a]] != 0.0) nonzero.push_back(a);
        }
        if (active_now != modelled) {
          const double g = rho * gap(r - me) * (modelled ? 1.0 : -1.0);
          for (std::size_t a : nonzero) rhs[a] += g * row[free_idx[a]];
        }
        if (!modelled) continue;
        for (std::size_t a : nonzero) {
          const double ra = rho * row[free_idx[a]];
          for (std::size_t b : nonzero) h[a * m + b] += ra * row[free_idx[b]];
        }
      }
      // Equilibrate to unit diagonal before factorising.
      equil.resize(m);
      for (std::size_t a = 0; a < m; ++a) equil[a] = 1.0 / std::sqrt(std::max(h[a * m + a], 1e-300));
      for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = 0; b < m; ++b) h[a * m + b] *= equil[a] * equil[b];
      }
      factor = h;
      double shift = 0.0;
      while (!cholesky(factor, m)) {
        shift = shift == 0.0 ? 1e-12 : 10.0 * shift;
        factor = h;
        for (std::size_t a = 0; a < m; ++a) factor[a * m + a] += shift;
        if (shift > 1e30) {
          factor.assign(m * m, 0.0);
          for (std::size_t a = 0; a < m; ++a) factor[a * m + a] = 1.0;
          break;
        }
      }
      for (std::size_t a = 0; a < m; ++a) rhs[a] *= equil[a];
      cholesky_solve(factor, m, rhs);
      for (std::size_t a = 0; a < m; ++a) rhs[a] *= equil[a];
      return shift <= 1e-6;
    };

    in_model.assign(mi, 0);
    for (std::size_t j = 0; j < mi; ++j) in_model[j] = cur.w_ineq[j] != 0.0;
    if (!newton_direction() && !fresh) {
      // Rounding has made the secant matrix indefinite.
      reset_identity(1.0);
      fresh = true;
      newton_direction();
    }
    first_pass = rhs;
    for (int pass = 1; pass < options.model_passes; ++pass) {
      bool changed = false;
      for (std::size_t j = 0; j < mi; ++j) {
        const char now = gap(j) - row_dot_d(me + j) > 0.0;
        if (now != in_model[j]) {
          in_model[j] = now;
          changed = true;
        }
      }
      if (!changed) break;
      newton_direction();
    }
    double slope = 0.0;
    for (std::size_t a = 0; a < m; ++a) slope += cur.grad[free_idx[a]] * rhs[a];
    if (!(slope < 0.0)) rhs = first_pass;
    // Held variables move onto the bound they are pressing against.
    for (std::size_t i = 0; i < n; ++i) d[i] = (cur.grad[i] > 0.0 ? lower[i] : upper[i]) - x[i];
    for (std::size_t a = 0; a < m; ++a) d[free_idx[a]] = rhs[a];

    // Relative step cap, widened after full steps and narrowed after cuts.
    double step = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double room = radius * std::max(std::abs(x[i]), options.radius_floor);
      if (std::abs(d[i]) * step > room) step = room / std::abs(d[i]);
    }
    const double capped = step;
    bool accepted = false;
    for (int bt = 0; bt < options.max_backtracks; ++bt) {
      for (std::size_t i = 0; i < n; ++i) x_trial[i] = std::clamp(x[i] + step * d[i], lower[i], upper[i]);
      double predicted = 0.0;
      for (std::size_t i = 0; i < n; ++i) predicted += cur.grad[i] * (x_trial[i] - x[i]);
      if (predicted < 0.0) {
        ++res.evaluations;
        const bool ok = evaluate_point(problem, terms, x_trial, trial);
        if (ok && trial.value <= cur.value + options.armijo * predicted) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }

    if (!accepted) {
      radius = std::max(0.25 * radius, 1e-8);
      if (!fresh) {
        reset_identity(1.0);
        fresh = true;
        continue;
      }
      res.stalled = true;
      break;
    }

    if (capped < 1.0) {
      radius = step == capped ? std::min(2.0 * radius, options.max_radius) : std::max(0.5 * radius, 1e-8);
    }

    // Lagrangian-part secant pair with the trial point's weights on both ends.
    problem.weighted_gradient(x, 1.0, trial.w_eq, trial.w_ineq, g_old_weights);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_trial[i] - x[i];
      y[i] = trial.grad[i] - g_old_weights[i];
    }
    double sy = dot(s, y);
    const double ss = dot(s, s);
    if (fresh && sy > 0.0) {
      reset_identity(dot(y, y) / sy);
      fresh = false;
    }
    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += B[i * n + j] * s[j];
      bs[i] = v;
    }
    const double sbs = dot(s, bs);
    if (sbs > 1e-16 * ss && ss > 0.0) {
      if (sy < 0.2 * sbs) {
        const double theta = 0.8 * sbs / (sbs - sy);
        for (std::size_t i = 0; i < n; ++i) y[i] = theta * y[i] + (1.0 - theta) * bs[i];
        sy = dot(s, y);
      }
      if (sy > 0.0) {
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) B[i * n + j] += y[i] * y[j] / sy - bs[i] * bs[j] / sbs;
        }
      }
    }

    const double change = cur.value - trial.value;
    x.swap(x_trial);
    std::swap(cur, trial);
    jac = dense_jacobian(problem, x);
    if (change <= 1e-15 * std::max(1.0, std::abs(cur.value))) {
      if (++flat_steps >= 10) {
        res.stalled = true;
        break;
      }
    } else {
      flat_steps = 0;
    }
  }
  res.value = cur.value;
  res.projected_gradient = projected_gradient_norm(x, cur.grad, lower, upper);
  if (res.projected_gradient <= options.tolerance) res.converged = true;
  return res;
}

}  // namespace optpop
