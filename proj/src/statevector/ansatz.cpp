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

#include <cmath>
#include <numbers>
#include <random>

#include "../random_util.hpp"
#include "vqh/error.hpp"
#include "vqh/statevector.hpp"

namespace vqh {

AnsatzSpec AnsatzSpec::linear(std::size_t n, std::size_t reps) {
    AnsatzSpec spec{n, reps, {}};
    for (std::size_t q = 0; q + 1 < n; ++q)
        spec.entanglement.emplace_back(q, q + 1);
    return spec;
}

void AnsatzSpec::validate() const {
    if (qubits < 1 || qubits > kMaxQubits)
        throw DomainError("ansatz qubit count " + std::to_string(qubits) +
                          " outside 1.." + std::to_string(kMaxQubits));
    for (const auto &[control, target] : entanglement) {
        if (control >= qubits || target >= qubits)
            throw DomainError("entanglement pair (" + std::to_string(control) +
                              "," + std::to_string(target) +
                              ") out of range");
        if (control == target)
            throw DomainError("entanglement pair with control == target");
    }
}

ParameterVector::ParameterVector(std::vector<double> values)
    : values_(std::move(values)) {
    for (double v : values_)
        if (!std::isfinite(v))
            throw DomainError("parameter not finite");
}

ParameterVector ParameterVector::random(std::size_t count,
                                        std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<double> values(count);
    for (auto &v : values)
        v = detail::uniform(rng, -std::numbers::pi, std::numbers::pi);
    return ParameterVector(std::move(values));
}

StateVector prepare_state(const AnsatzSpec &spec,
                          std::span<const double> params) {
    spec.validate();
    if (params.size() != spec.parameter_count())
        throw DimensionError("ansatz expects " +
                             std::to_string(spec.parameter_count()) +
                             " parameters, got " +
                             std::to_string(params.size()));
    const std::size_t n = spec.qubits;
    StateVector state(n);
    for (std::size_t layer = 0; layer <= spec.reps; ++layer) {
        if (layer > 0)
            for (const auto &[control, target] : spec.entanglement)
                state.cnot(control, target);
        const double *ry = params.data() + 2 * n * layer;
        const double *rz = ry + n;
        for (std::size_t q = 0; q < n; ++q)
            state.rotate_y(q, ry[q]);
        for (std::size_t q = 0; q < n; ++q)
            state.rotate_z(q, rz[q]);
    }
    return state;
}

} // namespace vqh
