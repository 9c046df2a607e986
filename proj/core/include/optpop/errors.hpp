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

#include <stdexcept>
#include <string>

namespace optpop {

/// Raised when a model relation is evaluated outside its domain.
/// `period()` is the 1-based generation index, or 0 when not tied to one.
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what, int period = 0)
      : std::domain_error(period > 0 ? what + " (t=" + std::to_string(period) + ")" : what),
        period_(period) {}

  int period() const noexcept { return period_; }

 private:
  int period_;
};

/// The capital transition has no root on the search bracket.
class InfeasibleTransition : public std::runtime_error {
 public:
  InfeasibleTransition(const std::string& what, double residual_at_lower, double residual_at_upper)
      : std::runtime_error(what),
        residual_at_lower_(residual_at_lower),
        residual_at_upper_(residual_at_upper) {}

  double residual_at_lower() const noexcept { return residual_at_lower_; }
  double residual_at_upper() const noexcept { return residual_at_upper_; }

 private:
  double residual_at_lower_;
  double residual_at_upper_;
};

/// Invalid parameters or configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace optpop
