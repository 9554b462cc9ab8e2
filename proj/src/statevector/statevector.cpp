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

#include "vqh/statevector.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "../random_util.hpp"
#include "vqh/error.hpp"
#include "vqh/kernels.hpp"

namespace vqh {

namespace {

void check_qubit_count(std::size_t n) {
    if (n < 1 || n > kMaxQubits)
        throw DomainError("qubit count " + std::to_string(n) +
                          " outside 1.." + std::to_string(kMaxQubits));
}

void check_index(std::size_t qubit, std::size_t n) {
    if (qubit >= n)
        throw DomainError("qubit index " + std::to_string(qubit) +
                          " out of range for " + std::to_string(n) +
                          " qubits");
}

} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 finaliser over the combined value.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

StateVector::StateVector(std::size_t n) : n_(n) {
    check_qubit_count(n);
    amps_.assign(std::size_t{1} << n, Amplitude{0.0, 0.0});
    amps_[0] = 1.0;
}

StateVector::StateVector(std::size_t n, std::vector<Amplitude> amplitudes)
    : n_(n), amps_(std::move(amplitudes)) {
    check_qubit_count(n);
    if (amps_.size() != (std::size_t{1} << n))
        throw DimensionError("expected " +
                             std::to_string(std::size_t{1} << n) +
                             " amplitudes, got " +
                             std::to_string(amps_.size()));
    if (std::abs(norm_squared() - 1.0) > 1e-9)
        throw DomainError("statevector is not normalised");
}

std::vector<double> StateVector::probabilities() const {
    std::vector<double> probs(amps_.size());
    kernels::active().probabilities(amps_, probs);
    return probs;
}

double StateVector::norm_squared() const {
    double acc = 0.0;
    for (const auto &a : amps_)
        acc += std::norm(a);
    return acc;
}

void StateVector::rotate_y(std::size_t qubit, double angle) {
    check_index(qubit, n_);
    kernels::active().apply_ry(amps_, qubit, std::cos(angle / 2),
                               std::sin(angle / 2));
}

void StateVector::rotate_z(std::size_t qubit, double angle) {
    check_index(qubit, n_);
    const Amplitude phase1 = std::polar(1.0, angle / 2);
    kernels::active().apply_rz(amps_, qubit, std::conj(phase1), phase1);
}

void StateVector::cnot(std::size_t control, std::size_t target) {
    check_index(control, n_);
    check_index(target, n_);
    if (control == target)
        throw DomainError("CNOT control and target coincide");
    kernels::active().apply_cnot(amps_, control, target);
}

StateVector apply_rotation(StateVector state, std::size_t qubit, Axis axis,
                           double angle) {
    if (axis == Axis::Y)
        state.rotate_y(qubit, angle);
    else
        state.rotate_z(qubit, angle);
    return state;
}

StateVector apply_cnot(StateVector state, std::size_t control,
                       std::size_t target) {
    state.cnot(control, target);
    return state;
}

double expectation(const StateVector &state, const IsingHamiltonian &h) {
    if (h.size() != state.qubits())
        throw DimensionError("Hamiltonian acts on " + std::to_string(h.size()) +
                             " spins, state has " +
                             std::to_string(state.qubits()) + " qubits");
    const auto energies = h.basis_energies();
    return expectation(state, energies);
}

double expectation(const StateVector &state,
                   std::span<const double> basis_energies) {
    if (basis_energies.size() != state.dimension())
        throw DimensionError("basis energy table does not match state");
    const auto probs = state.probabilities();
    return kernels::active().dot(probs, basis_energies);
}

MarginalDistribution marginals_from_probabilities(std::span<const double> probs,
                                                  std::size_t n) {
    MarginalDistribution p(n);
    const auto &k = kernels::active();
    for (std::size_t i = 0; i < n; ++i)
        p[i] = std::clamp(k.masked_sum(probs, i), 0.0, 1.0);
    return p;
}

MarginalDistribution marginals(const StateVector &state) {
    return marginals_from_probabilities(state.probabilities(), state.qubits());
}

std::map<std::uint64_t, std::uint64_t>
sample_indices(std::span<const double> probabilities, std::uint64_t shots,
               std::uint64_t seed) {
    if (shots == 0)
        throw DomainError("shots must be at least 1");
    std::vector<double> cumulative(probabilities.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < probabilities.size(); ++k) {
        acc += probabilities[k];
        cumulative[k] = acc;
    }
    std::mt19937_64 rng(seed);
    std::map<std::uint64_t, std::uint64_t> counts;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = detail::unit_double(rng) * acc;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        auto k = static_cast<std::uint64_t>(it - cumulative.begin());
        k = std::min<std::uint64_t>(k, cumulative.size() - 1);
        // Never report an outcome of probability zero.
        while (probabilities[k] == 0.0 && k > 0)
            --k;
        ++counts[k];
    }
    return counts;
}

std::map<std::string, std::uint64_t>
sample_counts(const StateVector &state, std::uint64_t shots,
              std::uint64_t seed) {
    const auto indices = sample_indices(state.probabilities(), shots, seed);
    std::map<std::string, std::uint64_t> counts;
    for (const auto &[k, count] : indices)
        counts[Configuration::from_index(k, state.qubits()).to_string()] =
            count;
    return counts;
}

} // namespace vqh
