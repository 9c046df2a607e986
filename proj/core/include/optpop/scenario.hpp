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

#include <limits>
#include <string>

namespace optpop {

/// Raw exogenous constants of one economy. Validated by ScenarioParams.
struct ScenarioFields {
  double alpha = 0.0;       ///< output elasticity of capital, (0,1)
  double beta = 0.0;        ///< time preference factor
  double gamma = 0.0;       ///< CRRA coefficient, != 1
  double delta = 0.0;       ///< depreciation, [0,1)
  double sigma = 0.0;       ///< energy-efficiency innovation scale
  double rho = 0.0;         ///< resource-availability decay scale
  double theta = 0.0;       ///< per-capita stock-energy extraction rate
  double mu = 0.0;          ///< critical utility level
  double lambda_pop = 0.0;  ///< minimum generation population
  double omega = 0.0;       ///< maximum population growth rate
  double R_bar = 0.0;       ///< stock-energy reserve at t = 1
  double k1 = 0.0;          ///< initial capital per effective labor
  double N1 = 0.0;          ///< initial population
  double G1 = 1.0;          ///< initial energy efficiency
  double H1 = 1.0;          ///< initial resource availability
};

/// Immutable, validated parameter set. Construction throws ConfigError on
/// any range violation.
class ScenarioParams {
 public:
  explicit ScenarioParams(const ScenarioFields& fields);

  const ScenarioFields& fields() const noexcept { return f_; }

  double alpha() const noexcept { return f_.alpha; }
  double beta() const noexcept { return f_.beta; }
  double gamma() const noexcept { return f_.gamma; }
  double delta() const noexcept { return f_.delta; }
  double sigma() const noexcept { return f_.sigma; }
  double rho() const noexcept { return f_.rho; }
  double theta() const noexcept { return f_.theta; }
  double mu() const noexcept { return f_.mu; }
  double lambda_pop() const noexcept { return f_.lambda_pop; }
  double omega() const noexcept { return f_.omega; }
  double R_bar() const noexcept { return f_.R_bar; }
  double k1() const noexcept { return f_.k1; }
  double N1() const noexcept { return f_.N1; }
  double G1() const noexcept { return f_.G1; }
  double H1() const noexcept { return f_.H1; }

  /// beta^(-1/gamma), shared by every savings expression.
  double impatience() const noexcept { return impatience_; }

  /// Hard upper bound on any generation's population (keeps rho*N < 1).
  double population_cap() const noexcept {
    return f_.rho > 0.0 ? population_cap_fraction / f_.rho : std::numeric_limits<double>::infinity();
  }

  static constexpr double population_cap_fraction = 0.999;

 private:
  ScenarioFields f_;
  double impatience_;
};

/// Reference parameters, scenario (a): slow innovation, fast resource decay.
ScenarioParams scenario_a();
/// Reference parameters, scenario (b): faster innovation, slower decay.
ScenarioParams scenario_b();

}  // namespace optpop
