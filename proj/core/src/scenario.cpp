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

#include "optpop/scenario.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "optpop/errors.hpp"

namespace optpop {

namespace {

void require(bool ok, const char* name, const char* rule, std::vector<std::string>& problems) {
  if (!ok) problems.push_back(std::string(name) + " must be " + rule);
}

}  // namespace

ScenarioParams::ScenarioParams(const ScenarioFields& fields) : f_(fields) {
  std::vector<std::string> problems;
  auto finite = [](double v) { return std::isfinite(v); };
  require(finite(f_.alpha) && f_.alpha > 0.0 && f_.alpha < 1.0, "alpha", "in (0,1)", problems);
  require(finite(f_.beta) && f_.beta > 0.0, "beta", "> 0", problems);
  require(finite(f_.gamma) && f_.gamma > 0.0 && f_.gamma != 1.0, "gamma", "> 0 and != 1", problems);
  require(finite(f_.delta) && f_.delta >= 0.0 && f_.delta < 1.0, "delta", "in [0,1)", problems);
  require(finite(f_.sigma) && f_.sigma >= 0.0, "sigma", ">= 0", problems);
  require(finite(f_.rho) && f_.rho >= 0.0, "rho", ">= 0", problems);
  require(finite(f_.theta) && f_.theta > 0.0, "theta", "> 0", problems);
  require(finite(f_.mu) && f_.mu > 0.0, "mu", "> 0", problems);
  require(finite(f_.lambda_pop) && f_.lambda_pop > 0.0, "lambda", "> 0", problems);
  require(finite(f_.omega) && f_.omega > 0.0, "omega", "> 0", problems);
  require(finite(f_.R_bar) && f_.R_bar > 0.0, "R_bar", "> 0", problems);
  require(finite(f_.k1) && f_.k1 > 0.0, "k1", "> 0", problems);
  require(finite(f_.N1) && f_.N1 > 0.0, "N1", "> 0", problems);
  require(finite(f_.G1) && f_.G1 > 0.0, "G1", "> 0", problems);
  require(finite(f_.H1) && f_.H1 > 0.0, "H1", "> 0", problems);
  if (problems.empty()) {
    require(f_.rho * f_.N1 < 1.0, "rho*N1", "< 1", problems);
    require(f_.lambda_pop < population_cap(), "lambda", "below the population cap 0.999/rho", problems);
  }
  if (!problems.empty()) {
    std::string msg = "invalid scenario parameters:";
    for (const auto& p : problems) msg += " " + p + ";";
    throw ConfigError(msg);
  }
  impatience_ = std::pow(f_.beta, -1.0 / f_.gamma);
}

namespace {

ScenarioFields reference_fields() {
  ScenarioFields f;
  f.alpha = 0.3;
  f.beta = 0.5;
  f.gamma = 0.4;
  f.delta = 0.3;
  f.theta = 1.0;
  f.mu = 1.0;
  f.lambda_pop = 0.1;
  f.omega = 3.37;
  f.R_bar = 50.0;
  f.k1 = 0.20;
  f.N1 = 1.0;
  f.G1 = 1.0;
  f.H1 = 1.0;
  return f;
}

}  // namespace

ScenarioParams scenario_a() {
  auto f = reference_fields();
  f.sigma = 0.001;
  f.rho = 0.006;
  return ScenarioParams(f);
}

ScenarioParams scenario_b() {
  auto f = reference_fields();
  f.sigma = 0.002;
  f.rho = 0.001;
  return ScenarioParams(f);
}

}  // namespace optpop
