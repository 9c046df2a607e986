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

#include "optpop/nlp_transcription.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "optpop/errors.hpp"

namespace optpop {

std::string_view to_string(Objective objective) {
  return objective == Objective::Utilitarian ? "utilitarian" : "maximin";
}

std::optional<Objective> parse_objective(std::string_view name) {
  if (name == "utilitarian") return Objective::Utilitarian;
  if (name == "maximin") return Objective::Maximin;
  return std::nullopt;
}

namespace {

constexpr double kCapitalLower = 1e-7;
constexpr double kCapitalUpper = 1e7;

// Per-period intermediate quantities of one evaluation. Quantities with a
// `hat` are per unit of productivity A.
struct Pass {
  std::vector<double> N, k, kpow, gfac, hfac, G, H, A, Apow, what, q, D, shat, chat, dhat, vhat, u;
  double sum_HN = 0.0;

  void resize(std::size_t T) {
    for (auto* v : {&N, &k, &kpow, &gfac, &hfac, &G, &H, &A, &Apow, &what, &q, &D, &shat, &chat, &dhat, &vhat, &u}) {
      v->resize(T);
    }
  }
};

void forward(const ScenarioParams& p, int T, std::span<const double> x, Pass& P) {
  const auto n = static_cast<std::size_t>(T);
  P.resize(n);
  const double al = p.alpha();
  const double ga = p.gamma();
  const double expo = 1.0 - 1.0 / ga;
  for (std::size_t i = 0; i < n; ++i) {
    const int t = static_cast<int>(i) + 1;
    const double N = i == 0 ? p.N1() : x[i - 1];
    const double k = i == 0 ? p.k1() : x[n - 1 + i - 1];
    if (!(N > 0.0) || !std::isfinite(N)) throw DomainError("population must be positive", t);
    if (p.rho() * N >= 1.0) throw DomainError("rho * N must stay below 1", t);
    if (!(k > 0.0) || !std::isfinite(k)) throw DomainError("capital intensity must be positive", t);
    P.N[i] = N;
    P.k[i] = k;
    P.kpow[i] = std::pow(k, al);
    P.gfac[i] = 1.0 + p.sigma() * N;
    P.hfac[i] = 1.0 - p.rho() * N;
  }
  P.G[0] = p.G1();
  P.H[0] = p.H1();
  P.sum_HN = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (i > 0) {
      P.G[i] = P.gfac[i - 1] * P.G[i - 1];
      P.H[i] = P.hfac[i - 1] * P.H[i - 1];
    }
    P.A[i] = P.G[i] * P.H[i];
    P.sum_HN += P.H[i] * P.N[i];
  }
  for (std::size_t i = 0; i < n; ++i) {
    P.what[i] = (1.0 - al) * P.kpow[i];
    P.q[i] = i + 1 < n ? 1.0 + al * P.kpow[i + 1] / P.k[i + 1] - p.delta() : 1.0 - p.delta();
    P.D[i] = 1.0 + p.impatience() * std::pow(P.q[i], expo);
    P.shat[i] = P.what[i] / P.D[i];
    P.chat[i] = P.what[i] - P.shat[i];
    P.dhat[i] = P.q[i] * P.shat[i];
    P.Apow[i] = std::pow(P.A[i], 1.0 - ga);
    P.vhat[i] = (std::pow(P.chat[i], 1.0 - ga) + p.beta() * std::pow(P.dhat[i], 1.0 - ga)) / (1.0 - ga);
    P.u[i] = P.Apow[i] * P.vhat[i];
  }
}

thread_local Pass scratch;

}  // namespace

NlpProblem::NlpProblem(ScenarioParams params, int horizon, Objective objective, DerivativeMode mode)
    : params_(std::move(params)), T_(horizon), objective_(objective), mode_(mode) {
  if (T_ < 2) throw ConfigError("planning horizon must be at least 2");
  const auto n = static_cast<std::size_t>(2 * (T_ - 1) + (objective_ == Objective::Maximin ? 1 : 0));
  lower_.assign(n, 0.0);
  upper_.assign(n, 0.0);
  for (int t = 2; t <= T_; ++t) {
    lower_[population_index(t)] = params_.lambda_pop();
    upper_[population_index(t)] = params_.population_cap();
    lower_[capital_index(t)] = kCapitalLower;
    upper_[capital_index(t)] = kCapitalUpper;
  }
  if (objective_ == Objective::Maximin) {
    lower_[min_utility_index()] = params_.mu();
    upper_[min_utility_index()] = std::numeric_limits<double>::infinity();
  }
}

std::size_t NlpProblem::population_index(int t) const {
  if (t < 2 || t > T_) throw DomainError("population index outside 2..T");
  return static_cast<std::size_t>(t - 2);
}

std::size_t NlpProblem::capital_index(int t) const {
  if (t < 2 || t > T_) throw DomainError("capital index outside 2..T");
  return static_cast<std::size_t>(T_ - 1 + t - 2);
}

std::size_t NlpProblem::min_utility_index() const {
  if (objective_ != Objective::Maximin) throw DomainError("u_min exists only for the maximin objective");
  return static_cast<std::size_t>(2 * (T_ - 1));
}

std::size_t NlpProblem::num_inequalities() const {
  return static_cast<std::size_t>(T_ + (T_ - 1) + (objective_ == Objective::Maximin ? T_ : 0));
}

void NlpProblem::evaluate(std::span<const double> x, Evaluation& out) const {
  if (x.size() != num_variables()) throw DomainError("decision vector has the wrong length");
  Pass& P = scratch;
  forward(params_, T_, x, P);
  const auto n = static_cast<std::size_t>(T_);
  const double al = params_.alpha();

  if (objective_ == Objective::Utilitarian) {
    double swf = 0.0;
    for (std::size_t i = 0; i < n; ++i) swf += P.u[i] * P.N[i];
    out.objective = -swf;
  } else {
    out.objective = -x[min_utility_index()];
  }

  out.equalities.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double growth = P.gfac[i] * P.hfac[i] * P.N[i + 1] / P.N[i];
    out.equalities[i] = residual_sign_ * (P.shat[i] - growth * al * P.kpow[i + 1] / P.q[i]);
  }
  out.equalities[n - 1] = params_.R_bar() - params_.theta() * P.sum_HN;

  out.inequalities.resize(num_inequalities());
  for (std::size_t i = 0; i < n; ++i) out.inequalities[i] = P.u[i] - params_.mu();
  const double cap = 1.0 + params_.omega();
  for (std::size_t i = 0; i + 1 < n; ++i) out.inequalities[n + i] = cap * P.N[i] - P.N[i + 1];
  if (objective_ == Objective::Maximin) {
    const double umin = x[min_utility_index()];
    for (std::size_t i = 0; i < n; ++i) out.inequalities[2 * n - 1 + i] = P.u[i] - umin;
  }
}

void NlpProblem::weighted_gradient(std::span<const double> x, double w_obj, std::span<const double> w_eq,
                                   std::span<const double> w_ineq, std::span<double> grad) const {
  if (mode_ == DerivativeMode::CentralDifference) {
    central_difference_gradient(*this, x, w_obj, w_eq, w_ineq, grad);
  } else {
    analytic_gradient(x, w_obj, w_eq, w_ineq, grad);
  }
}

void NlpProblem::analytic_gradient(std::span<const double> x, double w_obj, std::span<const double> w_eq,
                                   std::span<const double> w_ineq, std::span<double> grad) const {
  Pass& P = scratch;
  forward(params_, T_, x, P);
  const auto n = static_cast<std::size_t>(T_);
  const double al = params_.alpha();
  const double ga = params_.gamma();
  const double sig = params_.sigma();
  const double rh = params_.rho();
  const double expo = 1.0 - 1.0 / ga;

  thread_local std::vector<double> Wu, dN, dk;
  Wu.assign(n, 0.0);
  dN.assign(n, 0.0);
  dk.assign(n, 0.0);
  double d_umin = 0.0;

  if (objective_ == Objective::Utilitarian) {
    for (std::size_t i = 0; i < n; ++i) {
      Wu[i] -= w_obj * P.N[i];
      dN[i] -= w_obj * P.u[i];
    }
  } else {
    d_umin -= w_obj;
  }

  // Capital transitions couple (N_t, N_{t+1}, k_t, k_{t+1}).
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double e = w_eq[i];
    if (e == 0.0) continue;
    const double kn = P.k[i + 1];
    const double knpow = P.kpow[i + 1];
    const double q = P.q[i];
    const double dq = al * (al - 1.0) * knpow / (kn * kn);
    const double dD_dq = expo * (P.D[i] - 1.0) / q;
    const double m = P.gfac[i] * P.hfac[i] * P.N[i + 1] / P.N[i];
    const double required = al * knpow / q;
    dk[i] += e * al * P.shat[i] / P.k[i];
    dk[i + 1] += e * (-P.shat[i] * dD_dq * dq / P.D[i] - m * al * (al * knpow / kn * q - knpow * dq) / (q * q));
    dN[i] += e * P.N[i + 1] * (1.0 / (P.N[i] * P.N[i]) + sig * rh) * required;
    dN[i + 1] -= e * P.gfac[i] * P.hfac[i] / P.N[i] * required;
  }

  // Depletion: R_bar - theta sum H_t N_t, with H_t depending on earlier N.
  const double e_term = w_eq[n - 1];
  if (e_term != 0.0) {
    double suffix = 0.0;
    for (std::size_t j = n; j-- > 0;) {
      dN[j] += -e_term * params_.theta() * P.H[j] + e_term * params_.theta() * rh / P.hfac[j] * suffix;
      suffix += P.H[j] * P.N[j];
    }
  }

  for (std::size_t i = 0; i < n; ++i) Wu[i] += w_ineq[i];
  const double cap = 1.0 + params_.omega();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    dN[i] += cap * w_ineq[n + i];
    dN[i + 1] -= w_ineq[n + i];
  }
  if (objective_ == Objective::Maximin) {
    for (std::size_t i = 0; i < n; ++i) {
      Wu[i] += w_ineq[2 * n - 1 + i];
      d_umin -= w_ineq[2 * n - 1 + i];
    }
  }

  // Utility chain: u_t = A_t^(1-gamma) v(k_t, q_t), ln A_t sums over earlier N.
  double suffix = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    const double lj = sig / P.gfac[j] - rh / P.hfac[j];
    dN[j] += (1.0 - ga) * lj * suffix;
    suffix += Wu[j] * P.u[j];
    if (Wu[j] == 0.0) continue;
    dk[j] += Wu[j] * al * (1.0 - ga) * P.u[j] / P.k[j];
    if (j + 1 < n) {
      const double q = P.q[j];
      const double D = P.D[j];
      const double dD_dq = expo * (D - 1.0) / q;
      const double dchat_dq = P.what[j] * dD_dq / (D * D);
      const double ddhat_dq = P.shat[j] * (1.0 - q * dD_dq / D);
      const double dv_dq = std::pow(P.chat[j], -ga) * dchat_dq + params_.beta() * std::pow(P.dhat[j], -ga) * ddhat_dq;
      const double kn = P.k[j + 1];
      const double dq = al * (al - 1.0) * P.kpow[j + 1] / (kn * kn);
      dk[j + 1] += Wu[j] * P.Apow[j] * dv_dq * dq;
    }
  }

  for (int t = 2; t <= T_; ++t) {
    grad[population_index(t)] = dN[static_cast<std::size_t>(t - 1)];
    grad[capital_index(t)] = dk[static_cast<std::size_t>(t - 1)];
  }
  if (objective_ == Objective::Maximin) grad[min_utility_index()] = d_umin;
}

void NlpProblem::jacobian(std::span<const double> x, std::span<double> out) const {
  if (mode_ == DerivativeMode::CentralDifference) {
    SmoothProblem::jacobian(x, out);
    return;
  }
  Pass& P = scratch;
  forward(params_, T_, x, P);
  const auto n = static_cast<std::size_t>(T_);
  const std::size_t cols = num_variables();
  const double al = params_.alpha();
  const double ga = params_.gamma();
  const double sig = params_.sigma();
  const double rh = params_.rho();
  const double expo = 1.0 - 1.0 / ga;
  std::fill(out.begin(), out.end(), 0.0);
  // Generation i (0-based) maps to column i-1 for N and n-2+i for k.
  auto put_N = [&](std::size_t row, std::size_t i, double v) {
    if (i > 0) out[row * cols + i - 1] += v;
  };
  auto put_k = [&](std::size_t row, std::size_t i, double v) {
    if (i > 0) out[row * cols + n - 2 + i] += v;
  };

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double kn = P.k[i + 1];
    const double knpow = P.kpow[i + 1];
    const double q = P.q[i];
    const double dq = al * (al - 1.0) * knpow / (kn * kn);
    const double dD_dq = expo * (P.D[i] - 1.0) / q;
    const double m = P.gfac[i] * P.hfac[i] * P.N[i + 1] / P.N[i];
    const double required = al * knpow / q;
    put_k(i, i, al * P.shat[i] / P.k[i]);
    put_k(i, i + 1, -P.shat[i] * dD_dq * dq / P.D[i] - m * al * (al * knpow / kn * q - knpow * dq) / (q * q));
    put_N(i, i, P.N[i + 1] * (1.0 / (P.N[i] * P.N[i]) + sig * rh) * required);
    put_N(i, i + 1, -P.gfac[i] * P.hfac[i] / P.N[i] * required);
  }

  double suffix = 0.0;
  for (std::size_t j = n; j-- > 0;) {
    put_N(n - 1, j, -params_.theta() * P.H[j] + params_.theta() * rh / P.hfac[j] * suffix);
    suffix += P.H[j] * P.N[j];
  }

  const std::size_t u_row = n;
  const std::size_t rawls_row = objective_ == Objective::Maximin ? n + 2 * n - 1 : 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double ut = P.u[t];
    double grad_k = al * (1.0 - ga) * ut / P.k[t];
    double grad_kn = 0.0;
    if (t + 1 < n) {
      const double q = P.q[t];
      const double D = P.D[t];
      const double dD_dq = expo * (D - 1.0) / q;
      const double dchat_dq = P.what[t] * dD_dq / (D * D);
      const double ddhat_dq = P.shat[t] * (1.0 - q * dD_dq / D);
      const double dv_dq = std::pow(P.chat[t], -ga) * dchat_dq + params_.beta() * std::pow(P.dhat[t], -ga) * ddhat_dq;
      const double kn = P.k[t + 1];
      grad_kn = P.Apow[t] * dv_dq * al * (al - 1.0) * P.kpow[t + 1] / (kn * kn);
    }
    for (std::size_t row : {u_row + t, rawls_row + t}) {
      if (row == rawls_row + t && objective_ != Objective::Maximin) continue;
      for (std::size_t j = 1; j < t; ++j) {
        put_N(row, j, (1.0 - ga) * (sig / P.gfac[j] - rh / P.hfac[j]) * ut);
      }
      put_k(row, t, grad_k);
      if (t + 1 < n) put_k(row, t + 1, grad_kn);
      if (row == rawls_row + t) out[row * cols + min_utility_index()] = -1.0;
    }
  }

  const double cap = 1.0 + params_.omega();
  for (std::size_t i = 0; i + 1 < n; ++i) {
    put_N(u_row + n + i, i, cap);
    put_N(u_row + n + i, i + 1, -1.0);
  }
}

double NlpProblem::welfare(std::span<const double> x) const {
  Evaluation ev;
  evaluate(x, ev);
  return -ev.objective;
}

std::vector<double> NlpProblem::welfare_gradient(std::span<const double> x) const {
  std::vector<double> g(num_variables());
  const std::vector<double> w_eq(num_equalities(), 0.0), w_ineq(num_inequalities(), 0.0);
  weighted_gradient(x, -1.0, w_eq, w_ineq, g);
  return g;
}

std::vector<double> NlpProblem::populations(std::span<const double> x) const {
  std::vector<double> N(static_cast<std::size_t>(T_));
  N[0] = params_.N1();
  for (int t = 2; t <= T_; ++t) N[static_cast<std::size_t>(t - 1)] = x[population_index(t)];
  return N;
}

std::vector<double> NlpProblem::capitals(std::span<const double> x) const {
  std::vector<double> k(static_cast<std::size_t>(T_));
  k[0] = params_.k1();
  for (int t = 2; t <= T_; ++t) k[static_cast<std::size_t>(t - 1)] = x[capital_index(t)];
  return k;
}

std::vector<double> NlpProblem::utilities(std::span<const double> x) const {
  Pass& P = scratch;
  forward(params_, T_, x, P);
  return P.u;
}

Trajectory NlpProblem::trajectory(std::span<const double> x) const {
  return evaluate_schedule(populations(x), capitals(x), params_);
}

std::vector<double> NlpProblem::pack(std::span<const double> N, std::span<const double> k) const {
  if (N.size() != static_cast<std::size_t>(T_) || k.size() != N.size()) {
    throw DomainError("pack: schedules must have length T");
  }
  std::vector<double> x(num_variables(), 0.0);
  for (int t = 2; t <= T_; ++t) {
    x[population_index(t)] = N[static_cast<std::size_t>(t - 1)];
    x[capital_index(t)] = k[static_cast<std::size_t>(t - 1)];
  }
  if (objective_ == Objective::Maximin) {
    const auto u = utilities(x);
    x[min_utility_index()] = std::max(params_.mu(), *std::min_element(u.begin(), u.end()));
  }
  return x;
}

NlpProblem build_problem(const ScenarioParams& params, int horizon, Objective objective, DerivativeMode mode) {
  return NlpProblem(params, horizon, objective, mode);
}

namespace {

double depletion_residual(const ScenarioParams& p, std::span<const double> N) {
  double H = p.H1();
  double used = 0.0;
  for (double Nt : N) {
    used += H * Nt;
    H *= 1.0 - p.rho() * Nt;
  }
  return p.R_bar() - p.theta() * used;
}

std::vector<double> simulate_capital(const ScenarioParams& p, std::span<const double> N) {
  std::vector<double> n(N.size() - 1);
  for (std::size_t i = 0; i + 1 < N.size(); ++i) n[i] = N[i + 1] / N[i] - 1.0;
  const auto traj = forward_simulate(n, p, static_cast<int>(N.size()));
  std::vector<double> k;
  k.reserve(N.size());
  for (const auto& g : traj.generations) k.push_back(g.k);
  return k;
}

InitialGuess flat_guess(const NlpProblem& problem) {
  const auto& p = problem.params();
  const auto T = static_cast<std::size_t>(problem.horizon());
  std::vector<double> N(T, std::clamp(p.N1(), p.lambda_pop(), p.population_cap()));
  N[0] = p.N1();
  std::vector<double> k;
  try {
    k = simulate_capital(p, N);
  } catch (const std::exception&) {
    k.assign(T, p.k1());
  }
  InitialGuess g;
  g.x = problem.pack(N, k);
  if (problem.objective() == Objective::Maximin) g.x[problem.min_utility_index()] = p.mu();
  return g;
}

}  // namespace

bool scale_to_depletion(const NlpProblem& problem, std::vector<double>& N) {
  const auto& p = problem.params();
  const std::vector<double> base = N;
  auto scaled = [&](double s) {
    std::vector<double> out = base;
    for (std::size_t i = 1; i < out.size(); ++i) out[i] = std::clamp(s * base[i], p.lambda_pop(), p.population_cap());
    return out;
  };
  double lo = 1e-6;
  double hi = 1e6;
  if (depletion_residual(p, scaled(lo)) < 0.0 || depletion_residual(p, scaled(hi)) > 0.0) return false;
  for (int it = 0; it < 200 && hi / lo > 1.0 + 1e-15; ++it) {
    const double mid = std::sqrt(lo * hi);
    if (depletion_residual(p, scaled(mid)) > 0.0) lo = mid; else hi = mid;
  }
  N = scaled(std::sqrt(lo * hi));
  return true;
}

InitialGuess initial_guess(const NlpProblem& problem, const StartStrategy& strategy) {
  if (std::holds_alternative<FlatStart>(strategy)) return flat_guess(problem);

  const Trajectory* prior = std::get<WarmStart>(strategy).prior;
  if (prior == nullptr || prior->generations.empty()) {
    auto g = flat_guess(problem);
    g.fell_back_to_flat = true;
    g.note = "warm start without a prior trajectory";
    return g;
  }
  const auto& p = problem.params();
  const auto T = static_cast<std::size_t>(problem.horizon());
  const auto& gens = prior->generations;
  std::vector<double> N(T), k_prior(T);
  for (std::size_t i = 0; i < T; ++i) {
    const auto& src = gens[std::min(i, gens.size() - 1)];
    N[i] = src.N;
    k_prior[i] = src.k;
  }
  N[0] = p.N1();
  k_prior[0] = p.k1();
  if (!scale_to_depletion(problem, N)) {
    auto g = flat_guess(problem);
    g.fell_back_to_flat = true;
    g.note = "no population scaling exhausts the reserve within bounds";
    return g;
  }
  std::vector<double> k;
  try {
    k = simulate_capital(p, N);
  } catch (const std::exception&) {
    k = k_prior;
  }
  InitialGuess g;
  g.x = problem.pack(N, k);
  return g;
}

}  // namespace optpop
