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

#include "vqh/error.hpp"
#include "vqh/qubo.hpp"

namespace vqh {

namespace {

CouplingMap neighbour_couplings(const ChordSpec &spec, std::size_t n) {
    CouplingMap b;
    auto couple = [&](std::size_t k, std::size_t l) {
        const bool in_k = spec.notes.contains(k);
        const bool in_l = spec.notes.contains(l);
        b[{std::min(k, l), std::max(k, l)}] = (in_k != in_l) ? 1.0 : -1.0;
    };
    for (std::size_t k = 0; k + 1 < n; ++k)
        couple(k, k + 1);
    // A 2-ring would double the single edge.
    if (spec.boundary == Boundary::periodic && n > 2)
        couple(n - 1, 0);
    return b;
}

} // namespace

QuboProblem chord_qubo(const ChordSpec &spec, std::size_t n) {
    return chord_qubo(spec, chromatic_names(n));
}

QuboProblem chord_qubo(const ChordSpec &spec, std::vector<std::string> labels) {
    const std::size_t n = labels.size();
    for (auto note : spec.notes)
        if (note >= n)
            throw DomainError("chord note " + std::to_string(note) +
                              " outside 0.." + std::to_string(n - 1));
    std::vector<double> linear(n, 0.0);
    CouplingMap quadratic;

    switch (spec.encoding) {
    case ChordEncoding::linear:
        for (std::size_t i = 0; i < n; ++i)
            linear[i] = spec.notes.contains(i) ? -1.0 : 1.0;
        break;
    case ChordEncoding::coupled:
    case ChordEncoding::balanced:
        if (n < 2)
            throw DomainError("coupled chord encodings need at least 2 notes");
        quadratic = neighbour_couplings(spec, n);
        if (spec.encoding == ChordEncoding::balanced) {
            for (const auto &[key, value] : quadratic) {
                linear[key.first] -= 0.5 * value;
                linear[key.second] -= 0.5 * value;
            }
        }
        break;
    }
    return QuboProblem(std::move(labels), std::move(linear),
                       std::move(quadratic));
}

std::optional<std::string> chord_warning(const ChordSpec &spec) {
    if (spec.notes.empty() && spec.encoding != ChordEncoding::linear)
        return "empty chord under a coupled encoding: every coupling is -1 "
               "(ferromagnetic lattice)";
    return std::nullopt;
}

std::set<std::size_t> chord_notes(const std::vector<std::string> &names,
                                  const std::vector<std::string> &labels) {
    std::set<std::size_t> notes;
    for (const auto &name : names) {
        bool found = false;
        for (std::size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == name) {
                notes.insert(i);
                found = true;
                break;
            }
        }
        if (!found)
            throw DomainError("unknown note label '" + name + "'");
    }
    return notes;
}

ChordEncoding parse_chord_encoding(std::string_view name) {
    if (name == "linear")
        return ChordEncoding::linear;
    if (name == "coupled")
        return ChordEncoding::coupled;
    if (name == "balanced")
        return ChordEncoding::balanced;
    throw DomainError("unknown chord encoding '" + std::string(name) +
                      "' (expected linear, coupled or balanced)");
}

Boundary parse_boundary(std::string_view name) {
    if (name == "open")
        return Boundary::open;
    if (name == "periodic")
        return Boundary::periodic;
    throw DomainError("unknown boundary '" + std::string(name) +
                      "' (expected open or periodic)");
}

} // namespace vqh
