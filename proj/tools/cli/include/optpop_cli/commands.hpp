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

#include <iosfwd>
#include <string>
#include <vector>

namespace optpop::cli {

enum ExitCode : int {
  kSuccess = 0,
  kValidationFailed = 1,
  kConfigError = 2,
  kNumericalFailure = 3,
};

/// Entry point behind the optpop executable. `args` excludes the program
/// name. Output files go to --out-dir, else $OPTPOP_OUTPUT_DIR, else the
/// working directory.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace optpop::cli
