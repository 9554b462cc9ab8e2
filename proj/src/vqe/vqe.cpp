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

#include "vqh/vqe.hpp"

#include <algorithm>
#include <cmath>

#include "vqh/error.hpp"
#include "vqh/kernels.hpp"

namespace vqh {

std::string_view to_string(RunStatus status) {
    switch (status) {
    case RunStatus::completed:
        return "completed";
    case RunStatus::aborted:
        return "aborted";
    case RunStatus::failed:
        return "failed";
    }
    return "?";
}

namespace {

class Evaluator {
  public:
    Evaluator(const IsingHamiltonian &h, const AnsatzSpec &ansatz,
              const EngineOptions &options, std::uint64_t stream)
        : ansatz_(ansatz), energies_(h.basis_energies()),
          shots_(options.shots),
          shot_seed_(mix_seed(options.shot_seed, stream)) {
        if (h.size() != ansatz.qubits)
            throw DimensionError("Hamiltonian has " + std::to_string(h.size()) +
                                 " spins, ansatz has " +
                                 std::to_string(ansatz.qubits) + " qubits");
        if (shots_ && *shots_ == 0)
            throw DomainError("shots must be at least 1");
    }

    struct Evaluation {
        double energy;
        MarginalDistribution marginals;
    };

    Evaluation evaluate(std::span<const double> params) {
        const auto probs = prepare_state(ansatz_, params).probabilities();
        return {energy_from(probs),
                marginals_from_probabilities(probs, ansatz_.qubits)};
    }

    double energy(std::span<const double> params) {
        return energy_from(prepare_state(ansatz_, params).probabilities());
    }

    [[nodiscard]] double ground_energy() const {
        return *std::min_element(energies_.begin(), energies_.end());
    }

  private:
    double energy_from(const std::vector<double> &probs) {
        if (!shots_)
            return kernels::active().dot(probs, energies_);
        const auto counts =
            sample_indices(probs, *shots_, mix_seed(shot_seed_, draws_++));
        double sum = 0.0;
        for (const auto &[k, count] : counts)
            sum += static_cast<double>(count) * energies_[k];
        return sum / static_cast<double>(*shots_);
    }

    AnsatzSpec ansatz_;
    std::vector<double> energies_;
    std::optional<std::uint64_t> shots_;
    std::uint64_t shot_seed_;
    std::uint64_t draws_ = 0;
};

struct StageRequest {
    const IsingHamiltonian *hamiltonian;
    std::size_t iterations;
    std::size_t segment;
    double mix;
};

// Runs one stage, appending to `result`. Returns false when the run ended
// early (abort / failure) and later stages must not start.
bool run_stage(const StageRequest &req, const AnsatzSpec &ansatz,
               const OptimizerConfig &opt, ParameterVector &params,
               const RecordSink &sink, const EngineOptions &options,
               RunResult &result) {
    const std::size_t stage_index = result.stages.size();
    Evaluator evaluator(*req.hamiltonian, ansatz, options, stage_index);
    auto optimizer =
        make_optimizer(opt, ansatz.parameter_count(), stage_index);
    const Objective objective = [&](std::span<const double> x) {
        return evaluator.energy(x);
    };

    Stage stage{req.segment,         req.mix, *req.hamiltonian,
                result.records.size(), 0,     evaluator.ground_energy()};
    result.ground_energy = stage.ground_energy;

    bool ok = true;
    for (std::size_t t = 0; t < req.iterations; ++t) {
        if (options.stop.stop_requested()) {
            result.status = RunStatus::aborted;
            result.message = "aborted after " +
                             std::to_string(result.records.size()) + " steps";
            ok = false;
            break;
        }
        auto eval = evaluator.evaluate(params.values());
        if (!std::isfinite(eval.energy)) {
            result.status = RunStatus::failed;
            result.message = "non-finite energy at step " +
                             std::to_string(result.records.size());
            ok = false;
            break;
        }
        auto proposal = optimizer->propose(params.values(), eval.energy,
                                           objective);
        IterationRecord record{result.records.size(),
                               params,
                               std::move(eval.marginals),
                               eval.energy,
                               req.segment,
                               stage_index,
                               req.mix,
                               proposal.touched};
        if (sink)
            sink(record);
        result.records.push_back(std::move(record));
        ++stage.steps;
        if (t + 1 < req.iterations)
            params = ParameterVector(std::move(proposal.params));
    }
    result.stages.push_back(std::move(stage));
    return ok;
}

void finish(RunResult &result, const ParameterVector &params) {
    if (result.records.empty()) {
        result.final_params = params;
        return;
    }
    result.final_params = result.records.back().params;
    result.final_expectation = result.records.back().expectation;
}

void check_shapes(const IsingHamiltonian &h, const AnsatzSpec &ansatz,
                  const ParameterVector &initial) {
    ansatz.validate();
    if (h.size() != ansatz.qubits)
        throw DimensionError("Hamiltonian has " + std::to_string(h.size()) +
                             " spins, ansatz has " +
                             std::to_string(ansatz.qubits) + " qubits");
    if (initial.size() != ansatz.parameter_count())
        throw DimensionError("initial point has " +
                             std::to_string(initial.size()) +
                             " parameters, ansatz needs " +
                             std::to_string(ansatz.parameter_count()));
}

} // namespace

RunResult run_vqe(const IsingHamiltonian &h, const AnsatzSpec &ansatz,
                  const OptimizerConfig &opt, std::size_t iterations,
                  const ParameterVector &initial, const RecordSink &sink,
                  const EngineOptions &options) {
    check_shapes(h, ansatz, initial);
    if (iterations == 0)
        throw DomainError("iterations must be at least 1");
    opt.validate();
    RunResult result;
    ParameterVector params = initial;
    run_stage({&h, iterations, 0, 1.0}, ansatz, opt, params, sink, options,
              result);
    finish(result, params);
    return result;
}

void ScheduleSpec::validate() const {
    if (segments.empty())
        throw DomainError("schedule needs at least one segment");
    const std::size_t n = segments.front().hamiltonian.size();
    for (std::size_t s = 0; s < segments.size(); ++s) {
        if (segments[s].hamiltonian.size() != n)
            throw DimensionError("segment " + std::to_string(s) +
                                 " has a different spin count");
        if (segments[s].iterations == 0)
            throw DomainError("segment " + std::to_string(s) +
                              " has an empty iteration budget");
    }
    if (mode == ScheduleMode::adiabatic) {
        if (adiabatic_steps == 0)
            throw DomainError("adiabatic_steps must be at least 1");
        for (std::size_t s = 1; s < segments.size(); ++s)
            if (segments[s].iterations < adiabatic_steps)
                throw DomainError("segment " + std::to_string(s) +
                                  " budget is smaller than adiabatic_steps");
    }
}

RunResult run_schedule(const ScheduleSpec &schedule, const AnsatzSpec &ansatz,
                       const OptimizerConfig &opt,
                       const ParameterVector &initial, const RecordSink &sink,
                       const EngineOptions &options) {
    schedule.validate();
    check_shapes(schedule.segments.front().hamiltonian, ansatz, initial);
    opt.validate();

    RunResult result;
    ParameterVector params = initial;
    bool ok = true;
    for (std::size_t s = 0; ok && s < schedule.segments.size(); ++s) {
        const auto &segment = schedule.segments[s];
        if (schedule.mode == ScheduleMode::sequential || s == 0) {
            ok = run_stage({&segment.hamiltonian, segment.iterations, s, 1.0},
                           ansatz, opt, params, sink, options, result);
            continue;
        }
        const std::size_t m = schedule.adiabatic_steps;
        const auto &from = schedule.segments[s - 1].hamiltonian;
        for (std::size_t j = 1; ok && j <= m; ++j) {
            const double t = static_cast<double>(j) / static_cast<double>(m);
            const auto h = interpolate_ising(from, segment.hamiltonian, t);
            const std::size_t budget =
                segment.iterations / m + (j - 1 < segment.iterations % m);
            ok = run_stage({&h, budget, s, t}, ansatz, opt, params, sink,
                           options, result);
        }
    }
    finish(result, params);
    return result;
}

} // namespace vqh
