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
 * The VQE loop and multi-Hamiltonian schedules.
 *
 * Record semantics: record t holds the iterate theta_t the loop evaluated
 * at step t (theta_0 = initial parameters), its marginals and energy, and
 * the index of the parameter the optimizer changed when proposing
 * theta_{t+1}. A run of K iterations emits K records; its final parameters
 * are those of the last record.
 */

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "vqh/optimizers.hpp"
#include "vqh/qubo.hpp"
#include "vqh/statevector.hpp"

namespace vqh {

struct IterationRecord {
    std::size_t step = 0;
    ParameterVector params;
    MarginalDistribution marginals;
    double expectation = 0.0;
    /// Index into ScheduleSpec::segments.
    std::size_t segment = 0;
    /// Index into RunResult::stages.
    std::size_t stage = 0;
    /// Interpolation parameter of the stage Hamiltonian (1 outside
    /// adiabatic transitions).
    double mix = 1.0;
    /// Parameter changed by the proposal made at this step, if only one.
    std::optional<std::size_t> touched;
};

using RecordSink = std::function<void(const IterationRecord &)>;

/// One Hamiltonian optimised for a contiguous block of steps.
struct Stage {
    std::size_t segment = 0;
    double mix = 1.0;
    IsingHamiltonian hamiltonian;
    std::size_t first_step = 0;
    std::size_t steps = 0;
    /// Minimum basis energy of `hamiltonian`.
    double ground_energy = 0.0;
};

enum class RunStatus { completed, aborted, failed };
std::string_view to_string(RunStatus status);

struct RunResult {
    std::vector<IterationRecord> records;
    ParameterVector final_params;
    double final_expectation = 0.0;
    /// Ground energy of the last stage's Hamiltonian.
    std::optional<double> ground_energy;
    std::vector<Stage> stages;
    RunStatus status = RunStatus::completed;
    std::string message;
};

struct EngineOptions {
    /// Absent: exact expectation. Present: sample mean over this many shots.
    std::optional<std::uint64_t> shots;
    std::uint64_t shot_seed = 0;
    std::stop_token stop;
};

/// Optimises `h` for exactly `iterations` recorded steps.
///
/// Shape mismatches throw. A non-finite energy or a stop request ends the
/// run early with status `failed` / `aborted` and the records gathered so
/// far.
RunResult run_vqe(const IsingHamiltonian &h, const AnsatzSpec &ansatz,
                  const OptimizerConfig &opt, std::size_t iterations,
                  const ParameterVector &initial, const RecordSink &sink = {},
                  const EngineOptions &options = {});

enum class ScheduleMode { sequential, adiabatic };

struct ScheduleSegment {
    IsingHamiltonian hamiltonian;
    std::size_t iterations = 0;
    std::string label;
};

struct ScheduleSpec {
    std::vector<ScheduleSegment> segments;
    ScheduleMode mode = ScheduleMode::sequential;
    /// Interpolation sub-steps per transition (adiabatic mode).
    std::size_t adiabatic_steps = 1;

    void validate() const;
};

/// Runs every segment with final-parameter carry-over.
///
/// In adiabatic mode the transition into segment s > 0 is split into m
/// stages optimising interpolate_ising(H_{s-1}, H_s, j/m), j = 1..m, which
/// share segment s's iteration budget (remainder to the earliest stages).
RunResult run_schedule(const ScheduleSpec &schedule, const AnsatzSpec &ansatz,
                       const OptimizerConfig &opt,
                       const ParameterVector &initial,
                       const RecordSink &sink = {},
                       const EngineOptions &options = {});

} // namespace vqh
