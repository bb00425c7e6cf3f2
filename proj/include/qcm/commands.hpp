// Copyright 2026 The qcm Authors
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

// Subcommands of the qcm tool. Each returns the process exit code:
// 0 success, 2 config error, 3 validation failure, 4 integration failure,
// 5 inversion-quality failure (1 for anything unexpected).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "qcm/run_config.hpp"

namespace qcm {

struct CommandOptions {
  std::string config_path;
  std::optional<std::string> out_dir;  // overrides output.directory
  std::size_t threads = 1;
  std::uint64_t seed = 1;
};

inline constexpr const char* kCommands[] = {"validate", "evolve", "charfunc", "counts", "homodyne", "oracle-compare"};

/// Loads the config, runs the command, maps exceptions to exit codes and
/// reports errors on `err`. A one-line summary goes to `out`.
int run_command(const std::string& command, const CommandOptions& opts, std::ostream& out, std::ostream& err);

int cmd_validate(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_evolve(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_charfunc(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_counts(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_homodyne(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);
int cmd_oracle_compare(const RunConfig& cfg, const CommandOptions& opts, std::ostream& out);

/// Exit code for an exception thrown by the library.
int exit_code_for(const std::exception& e);

/// 17 significant digits, round-trip exact.
std::string format_double(double x);

}  // namespace qcm
