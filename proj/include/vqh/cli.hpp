// Copyright 2026 The VQH Authors
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

/**
 * @file
 * Command interpreter behind the `vqh` tool. Commands run either once from
 * the process arguments or line by line from a prompt.
 *
 *   runvqe <qubo.csv> [conf.json]
 *   play <strategy> [--frame-dur s] [--out path]
 *   oracle <qubo.csv>
 *   compare-optimizers <qubo.csv> [conf.json]
 *   serve [--port p]
 *
 * Exit codes: 0 success, 1 usage, 2 input parse, 3 runtime.
 */

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "vqh/run_config.hpp"
#include "vqh/sonification.hpp"

namespace vqh {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_parse = 2, exit_runtime = 3 };

struct CliState {
    std::optional<std::string> qubo_path;
    std::optional<std::string> config_path;
    std::optional<RunResult> last_run;
    std::optional<SonificationStream> last_stream;
};

/// VQH_OUTPUT_DIR, or the working directory.
std::filesystem::path default_output_dir();

class Cli {
  public:
    Cli(std::ostream &out, std::ostream &err,
        std::filesystem::path output_dir = default_output_dir());

    /// One command; args[0] is the command name.
    int execute(std::vector<std::string> args);
    /// Reads commands until EOF or `quit`. Returns the last exit code.
    int repl(std::istream &in, bool prompt = true);

    [[nodiscard]] const CliState &state() const { return state_; }
    [[nodiscard]] const std::filesystem::path &output_dir() const {
        return output_dir_;
    }

  private:
    int runvqe(std::vector<std::string> &args);
    int play(std::vector<std::string> &args);
    int oracle(std::vector<std::string> &args);
    int compare(std::vector<std::string> &args);
    int serve(std::vector<std::string> &args);
    int help();

    std::optional<SonificationStream> stored_stream();

    std::ostream &out_;
    std::ostream &err_;
    std::filesystem::path output_dir_;
    CliState state_;
};

/// Splits a prompt line into words; double quotes group.
std::vector<std::string> split_command_line(const std::string &line);

/// Entry point for the `vqh` executable.
int cli_main(int argc, char **argv);

} // namespace vqh
