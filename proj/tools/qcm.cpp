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

// qcm: command-line front end.
//
//   qcm <validate|evolve|charfunc|counts|homodyne|oracle-compare> --config PATH
//       [--out DIR] [--threads N] [--seed N]

#include <CLI11.hpp>
#include <iostream>

#include "qcm/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Continuous-measurement statistics through the reduced characteristic operator", "qcm"};
  app.set_version_flag("--version", std::string("qcm ") + QCM_VERSION);
  app.require_subcommand(1);

  qcm::CommandOptions opts;
  std::string out_dir;
  for (const char* name : qcm::kCommands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", opts.config_path, "JSON run configuration")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.directory)");
    sub->add_option("--threads", opts.threads, "worker threads for kappa grids")->check(CLI::PositiveNumber);
    sub->add_option("--seed", opts.seed, "seed for random-vector checks");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  if (!out_dir.empty()) opts.out_dir = out_dir;
  const std::string command = app.get_subcommands().front()->get_name();
  return qcm::run_command(command, opts, std::cout, std::cerr);
}
