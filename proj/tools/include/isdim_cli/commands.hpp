// Copyright 2026 The isdim Authors
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

#ifndef ISDIM_CLI_COMMANDS_HPP
#define ISDIM_CLI_COMMANDS_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <isdim_cli/config.hpp>
#include <isdim_cli/table.hpp>

namespace isdim::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitIo = 4,
};

/// Runs a validated experiment. Library errors propagate as isdim::Error.
Result run_experiment(const ExperimentConfig& config);

/// Full command line: parse, validate, run, render and write. Diagnostics go to
/// `err`; per-row summaries go to `err` when the results go to standard output
/// and to `out` otherwise.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses config text plus overrides and renders the result without a timestamp.
std::string run_to_string(const std::string& config_text, const std::vector<std::string>& overrides = {});

}  // namespace isdim::cli

#endif
