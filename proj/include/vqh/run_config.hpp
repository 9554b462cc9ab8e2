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
 * Run configuration document (JSON) and its translation into a schedule.
 * The schema ships as schemas/run_config.schema.json.
 */

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stop_token>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vqh/error.hpp"
#include "vqh/qubo.hpp"
#include "vqh/vqe.hpp"

namespace vqh {

/// Document failed validation; `issues()` lists "field: problem" entries.
class ValidationError : public Error {
  public:
    explicit ValidationError(std::vector<std::string> issues);
    [[nodiscard]] const std::vector<std::string> &issues() const noexcept {
        return issues_;
    }

  private:
    std::vector<std::string> issues_;
};

struct ChordSource {
    std::vector<std::string> notes;
    ChordEncoding encoding = ChordEncoding::linear;
    Boundary boundary = Boundary::periodic;
};

struct SegmentSource {
    /// Exactly one of these is set; none means "the run's base QUBO".
    std::optional<std::string> qubo_path;
    std::optional<std::string> qubo_csv;
    std::optional<ChordSource> chord;
    std::optional<std::size_t> iterations;
    std::string label;
};

enum class InitialMode { zeros, random };

struct RunConfig {
    std::size_t iterations = 150;
    OptimizerConfig optimizer;
    std::size_t reps = 1;
    /// Absent: linear chain.
    std::optional<std::vector<std::pair<std::size_t, std::size_t>>>
        entanglement;
    std::optional<std::uint64_t> shots;
    InitialMode initial = InitialMode::zeros;
    std::uint64_t initial_seed = 0;
    ScheduleMode mode = ScheduleMode::sequential;
    std::size_t adiabatic_steps = 1;
    std::vector<SegmentSource> segments;
    double frame_duration = 0.25;
};

/// Collects every offending field before throwing ValidationError.
RunConfig parse_run_config(const nlohmann::json &doc);
RunConfig load_run_config(const std::string &path);
nlohmann::json to_json(const RunConfig &config);

/// Everything needed to execute a configured run.
struct PreparedRun {
    std::vector<std::string> labels;
    /// QUBO of each schedule segment, parallel to schedule.segments.
    std::vector<QuboProblem> problems;
    ScheduleSpec schedule;
    AnsatzSpec ansatz;
    OptimizerConfig optimizer;
    ParameterVector initial;
    std::optional<std::uint64_t> shots;
    double frame_duration = 0.25;
    std::vector<std::string> warnings;
};

/// Resolves segments against `base` (the QUBO given alongside the config).
/// Relative `qubo` paths resolve against `config_dir`; when `allow_paths`
/// is false, file references are rejected.
PreparedRun prepare_run(const QuboProblem &base, const RunConfig &config,
                        const std::filesystem::path &config_dir = {},
                        bool allow_paths = true);

RunResult execute(const PreparedRun &run, const RecordSink &sink = {},
                  std::stop_token stop = {});

} // namespace vqh
