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

#include "optpop/olg_model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "optpop/errors.hpp"

namespace optpop {

namespace {

constexpr double kOverdrawTolerance = 1e-10;

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

// 1 + beta^(-1/gamma) q^(1 - 1/gamma): the savings denominator for gross
// return q.
double savings_denominator(double q, const ScenarioParams& p) {
  return 1.0 + p.impatience() * std::pow(q, 1.0 - 1.0 / p.gamma());
}

}  // namespace

double wage(double k, double A, const ScenarioParams& p) {
  if (!positive(k)) throw DomainError("wage: capital intensity must be positive");
  if (!positive(A)) throw DomainError("wage: productivity must be positive");
  return A * (1.0 - p.alpha()) * std::pow(k, p.alpha());
}

double rate_of_return(double k_next, const ScenarioParams& p) {
  if (!positive(k_next)) throw DomainError("rate_of_return: capital intensity must be positive");
  return p.alpha() * std::pow(k_next, p.alpha() - 1.0) - p.delta();
}

double savings_rule(double w, double r_next, const ScenarioParams& p) {
  if (!std::isfinite(w) || w < 0.0) throw DomainError("savings_rule: wage must be non-negative");
  const double q = 1.0 + r_next;
  if (!positive(q)) throw DomainError("savings_rule: gross return 1 + r must be positive");
  return w / savings_denominator(q, p);
}

double terminal_savings(double w, const ScenarioParams& p) {
  if (!std::isfinite(w) || w < 0.0) throw DomainError("terminal_savings: wage must be non-negative");
  if (p.delta() >= 1.0) throw DomainError("terminal_savings: delta = 1 leaves nothing for old age");
  return w / savings_denominator(1.0 - p.delta(), p);
}

double lifetime_utility(double c, double d_old, const ScenarioParams& p) {
  if (!positive(c)) throw DomainError("lifetime_utility: young consumption must be positive");
  if (!positive(d_old)) throw DomainError("lifetime_utility: old-age consumption must be positive");
  const double e = 1.0 - p.gamma();
  return (std::pow(c, e) + p.beta() * std::pow(d_old, e)) / e;
}

double productivity_growth(double N, const ScenarioParams& p) {
  if (!std::isfinite(N) || N < 0.0) throw DomainError("productivity_growth: population must be non-negative");
  if (p.rho() * N >= 1.0) throw DomainError("productivity_growth: rho * N must stay below 1");
  return (1.0 + p.sigma() * N) * (1.0 - p.rho() * N) - 1.0;
}

StockState state_update(const StockState& s, double N, const ScenarioParams& p) {
  if (!std::isfinite(N) || N < 0.0) throw DomainError("state_update: population must be non-negative");
  if (p.rho() * N >= 1.0) throw DomainError("state_update: rho * N must stay below 1");
  StockState next;
  next.G = (1.0 + p.sigma() * N) * s.G;
  next.H = (1.0 - p.rho() * N) * s.H;
  next.A = next.G * next.H;
  next.R = s.R - p.theta() * s.H * N;
  next.overdrawn = s.overdrawn || next.R < -kOverdrawTolerance;
  return next;
}

StockState state_update(const GenerationState& g, const ScenarioParams& p) {
  return state_update(StockState{g.G, g.H, g.A, g.R, false}, g.N, p);
}

double capital_residual(double k_t, double k_next, double a_t, double n_t, const ScenarioParams& p) {
  if (!positive(k_t) || !positive(k_next)) throw DomainError("capital_residual: capital intensities must be positive");
  const double q = 1.0 + p.alpha() * std::pow(k_next, p.alpha() - 1.0) - p.delta();
  if (!positive(q)) throw DomainError("capital_residual: gross return must be positive");
  const double growth = (1.0 + a_t) * (1.0 + n_t);
  if (!std::isfinite(growth)) throw DomainError("capital_residual: non-finite growth factor");
  const double saved = (1.0 - p.alpha()) * std::pow(k_t, p.alpha()) / savings_denominator(q, p);
  const double required = growth * p.alpha() * std::pow(k_next, p.alpha()) / q;
  return saved - required;
}

namespace {

double capital_residual_slope(double k_t, double k_next, double a_t, double n_t, const ScenarioParams& p) {
  const double al = p.alpha();
  const double kpow = std::pow(k_next, al);
  const double q = 1.0 + al * kpow / k_next - p.delta();
  const double dq = al * (al - 1.0) * kpow / (k_next * k_next);
  const double expo = 1.0 - 1.0 / p.gamma();
  const double D = 1.0 + p.impatience() * std::pow(q, expo);
  const double dD = p.impatience() * expo * std::pow(q, expo - 1.0) * dq;
  const double what = (1.0 - al) * std::pow(k_t, al);
  const double growth = (1.0 + a_t) * (1.0 + n_t);
  const double d_saved = -what * dD / (D * D);
  const double d_required = growth * al * (al * kpow / k_next * q - kpow * dq) / (q * q);
  return d_saved - d_required;
}

}  // namespace

double solve_k_next(double k_t, double a_t, double n_t, const ScenarioParams& p, const RootOptions& opts) {
  auto f = [&](double k) { return capital_residual(k_t, k, a_t, n_t, p); };
  double lo = opts.lower;
  double hi = opts.upper;
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    std::ostringstream msg;
    msg << "solve_k_next: no sign change on [" << lo << ", " << hi << "] (residuals " << f_lo << ", " << f_hi << ")";
    throw InfeasibleTransition(msg.str(), f_lo, f_hi);
  }

  // Bisection in log space until the bracket is narrow.
  int iter = 0;
  while (iter < opts.max_iterations && hi / lo > 1.0 + 1e-8) {
    const double mid = std::sqrt(lo * hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
      f_hi = f_mid;
    }
    ++iter;
  }

  double k = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  double fk = std::abs(f_lo) < std::abs(f_hi) ? f_lo : f_hi;
  for (int polish = 0; polish < 20 && std::abs(fk) > opts.tolerance; ++polish) {
    const double slope = capital_residual_slope(k_t, k, a_t, n_t, p);
    if (slope == 0.0 || !std::isfinite(slope)) break;
    double candidate = k - fk / slope;
    if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
    const double fc = f(candidate);
    if ((fc > 0.0) == (f_lo > 0.0)) {
      lo = candidate;
      f_lo = fc;
    } else {
      hi = candidate;
      f_hi = fc;
    }
    if (std::abs(fc) >= std::abs(fk)) break;
    k = candidate;
    fk = fc;
  }
  return k;
}

std::vector<double> Trajectory::populations() const {
  std::vector<double> out;
  out.reserve(generations.size());
  for (const auto& g : generations) out.push_back(g.N);
  return out;
}

std::vector<double> Trajectory::utilities() const {
  std::vector<double> out;
  out.reserve(generations.size());
  for (const auto& g : generations) out.push_back(g.u);
  return out;
}

Trajectory evaluate_schedule(std::span<const double> N, std::span<const double> k, const ScenarioParams& p) {
  const std::size_t T = N.size();
  if (T == 0 || k.size() != T) throw DomainError("evaluate_schedule: N and k must be non-empty and of equal length");
  Trajectory traj;
  traj.generations.resize(T);
  StockState stock{p.G1(), p.H1(), p.G1() * p.H1(), p.R_bar(), false};
  for (std::size_t i = 0; i < T; ++i) {
    const int t = static_cast<int>(i) + 1;
    auto& g = traj.generations[i];
    g.t = t;
    g.N = N[i];
    g.k = k[i];
    if (!positive(g.N)) throw DomainError("population must be positive", t);
    if (!positive(g.k)) throw DomainError("capital intensity must be positive", t);
    if (p.rho() * g.N >= 1.0) throw DomainError("rho * N must stay below 1", t);
    g.G = stock.G;
    g.H = stock.H;
    g.A = stock.A;
    g.R = stock.R;
    g.a = productivity_growth(g.N, p);
    g.w = wage(g.k, g.A, p);
    if (i + 1 < T) {
      g.n = N[i + 1] / N[i] - 1.0;
      g.r_next = rate_of_return(k[i + 1], p);
      g.s = savings_rule(g.w, g.r_next, p);
      g.d_old = (1.0 + g.r_next) * g.s;
    } else {
      g.n = -1.0;
      g.r_next = -p.delta();
      g.s = terminal_savings(g.w, p);
      g.d_old = (1.0 - p.delta()) * g.s;
    }
    g.c = g.w - g.s;
    try {
      g.u = lifetime_utility(g.c, g.d_old, p);
    } catch (const DomainError& e) {
      throw DomainError(e.what(), t);
    }
    stock = state_update(stock, g.N, p);
  }
  traj.terminal_reserve = stock.R;
  return traj;
}

Trajectory forward_simulate(std::span<const double> growth_rates, const ScenarioParams& p, int T,
                            const RootOptions& roots) {
  if (T < 2) throw DomainError("forward_simulate: horizon must be at least 2");
  if (growth_rates.size() != static_cast<std::size_t>(T - 1)) {
    throw DomainError("forward_simulate: expected T-1 growth rates");
  }
  std::vector<double> N(T), k(T);
  N[0] = p.N1();
  k[0] = p.k1();
  for (int i = 0; i + 1 < T; ++i) {
    const int t = i + 1;
    const double n = growth_rates[i];
    N[i + 1] = (1.0 + n) * N[i];
    if (!positive(N[i + 1])) throw DomainError("population growth drives N_{t+1} non-positive", t);
    if (p.rho() * N[i + 1] >= 1.0) throw DomainError("population N_{t+1} exceeds 1/rho", t);
    double a = 0.0;
    try {
      a = productivity_growth(N[i], p);
      k[i + 1] = solve_k_next(k[i], a, n, p, roots);
    } catch (const InfeasibleTransition& e) {
      throw InfeasibleTransition(std::string(e.what()) + " (t=" + std::to_string(t) + ")", e.residual_at_lower(),
                                 e.residual_at_upper());
    } catch (const DomainError& e) {
      throw DomainError(e.what(), t);
    }
  }
  return evaluate_schedule(N, k, p);
}

InvariantReport check_invariants(const Trajectory& traj, const ScenarioParams& p, double tolerance,
                                 bool require_depletion) {
  InvariantReport rep;
  auto check = [&](double lhs, double rhs, const std::string& what, int t) {
    const double err = std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
    rep.max_violation = std::max(rep.max_violation, err);
    if (!(err <= tolerance) && rep.ok) {
      rep.ok = false;
      std::ostringstream msg;
      msg << what << " violated at t=" << t << " (relative error " << err << ")";
      rep.first_failure = msg.str();
    }
  };
  const auto& gs = traj.generations;
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const auto& g = gs[i];
    check(g.A, g.G * g.H, "A = G H", g.t);
    const double next_R = (i + 1 < gs.size()) ? gs[i + 1].R : traj.terminal_reserve;
    check(next_R, g.R - p.theta() * g.H * g.N, "R_{t+1} = R_t - theta H_t N_t", g.t);
    if (next_R > g.R + tolerance) check(next_R, g.R, "R non-increasing", g.t);
    if (i + 1 < gs.size()) {
      const auto& h = gs[i + 1];
      check(h.N, (1.0 + g.n) * g.N, "N_{t+1} = (1 + n_t) N_t", g.t);
      check(h.G, (1.0 + p.sigma() * g.N) * g.G, "G_{t+1} = (1 + sigma N_t) G_t", g.t);
      check(h.H, (1.0 - p.rho() * g.N) * g.H, "H_{t+1} = (1 - rho N_t) H_t", g.t);
    }
  }
  if (require_depletion) check(traj.terminal_reserve, 0.0, "R_{T+1} = 0", traj.horizon());
  return rep;
}

}  // namespace optpop
