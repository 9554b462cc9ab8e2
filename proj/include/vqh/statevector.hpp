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
 * Dense statevector simulation of the hardware-efficient Ry/Rz + CNOT
 * ansatz, plus the observables the sonification consumes.
 */

#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "vqh/qubo.hpp"

namespace vqh {

using Amplitude = std::complex<double>;

inline constexpr std::size_t kMaxQubits = 16;

class StateVector {
  public:
    /// |0...0> on n qubits, 1 <= n <= kMaxQubits.
    explicit StateVector(std::size_t n);
    /// Takes ownership of 2^n amplitudes; throws unless normalised to 1e-9.
    StateVector(std::size_t n, std::vector<Amplitude> amplitudes);

    [[nodiscard]] std::size_t qubits() const noexcept { return n_; }
    [[nodiscard]] std::size_t dimension() const noexcept {
        return amps_.size();
    }
    [[nodiscard]] std::span<const Amplitude> amplitudes() const noexcept {
        return amps_;
    }
    [[nodiscard]] std::vector<double> probabilities() const;
    [[nodiscard]] double norm_squared() const;

    // In-place gates, used by the free functions and by prepare_state.
    void rotate_y(std::size_t qubit, double angle);
    void rotate_z(std::size_t qubit, double angle);
    void cnot(std::size_t control, std::size_t target);

  private:
    std::size_t n_;
    std::vector<Amplitude> amps_;
};

enum class Axis { Y, Z };

/// Ry/Rz ranks separated by CNOT layers (EfficientSU2-style).
///
/// Parameter layout is layer-major: layer l holds n Ry angles (by qubit)
/// followed by n Rz angles. Layer 0 acts on |0...0>; each later layer is
/// preceded by the entangling CNOT list. No trailing CNOT rank.
struct AnsatzSpec {
    std::size_t qubits = 0;
    std::size_t reps = 1;
    std::vector<std::pair<std::size_t, std::size_t>> entanglement;

    /// Chain (0,1), (1,2), ..., (n-2,n-1).
    static AnsatzSpec linear(std::size_t n, std::size_t reps = 1);

    [[nodiscard]] std::size_t parameter_count() const noexcept {
        return 2 * qubits * (reps + 1);
    }
    /// Throws DomainError on bad indices or qubit count.
    void validate() const;
};

/// Rotation angles in radians; layout described on AnsatzSpec.
class ParameterVector {
  public:
    ParameterVector() = default;
    explicit ParameterVector(std::vector<double> values);

    static ParameterVector zeros(std::size_t count) {
        return ParameterVector(std::vector<double>(count, 0.0));
    }
    /// Uniform in (-pi, pi) from a seeded generator.
    static ParameterVector random(std::size_t count, std::uint64_t seed);

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] std::span<const double> values() const noexcept {
        return values_;
    }
    [[nodiscard]] double operator[](std::size_t i) const { return values_[i]; }

    friend bool operator==(const ParameterVector &,
                           const ParameterVector &) = default;

  private:
    std::vector<double> values_;
};

/// p[i] = probability that qubit i reads |1>.
using MarginalDistribution = std::vector<double>;

StateVector prepare_state(const AnsatzSpec &spec,
                          std::span<const double> params);
inline StateVector prepare_state(const AnsatzSpec &spec,
                                 const ParameterVector &params) {
    return prepare_state(spec, params.values());
}

StateVector apply_rotation(StateVector state, std::size_t qubit, Axis axis,
                           double angle);
StateVector apply_cnot(StateVector state, std::size_t control,
                       std::size_t target);

/// Exact <psi|H|psi> for a diagonal H.
double expectation(const StateVector &state, const IsingHamiltonian &h);
/// Same, with the precomputed diagonal of H (IsingHamiltonian::basis_energies).
double expectation(const StateVector &state,
                   std::span<const double> basis_energies);

MarginalDistribution marginals(const StateVector &state);
MarginalDistribution marginals_from_probabilities(std::span<const double> probs,
                                                  std::size_t n);

/// Multinomial draw of `shots` measurements; keys are basis indices.
std::map<std::uint64_t, std::uint64_t>
sample_indices(std::span<const double> probabilities, std::uint64_t shots,
               std::uint64_t seed);
/// Histogram keyed by bitstring (index 0 leftmost).
std::map<std::string, std::uint64_t>
sample_counts(const StateVector &state, std::uint64_t shots,
              std::uint64_t seed);

/// Deterministic 64-bit mixer used to derive independent sub-seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream);

} // namespace vqh
