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
 * Data-parallel inner loops of the simulator and the renderers.
 *
 * Every kernel has a scalar reference implementation. Vectorised variants
 * are compiled into separate translation units with their own ISA flags
 * and selected once at startup from CPUID; the environment variable
 * `VQH_KERNELS=scalar` forces the reference path. Variants must agree with
 * the reference to 1e-12 relative (tests/unit/test_kernels.cpp).
 */

#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

namespace vqh::kernels {

using Complex = std::complex<double>;

struct KernelTable {
    std::string_view name;

    /// Real 2x2 rotation [[c, -s], [s, c]] on every amplitude pair of `qubit`.
    void (*apply_ry)(std::span<Complex> amps, std::size_t qubit, double c,
                     double s);
    /// Diagonal phase: amplitudes with bit `qubit` clear get `phase0`,
    /// set get `phase1`.
    void (*apply_rz)(std::span<Complex> amps, std::size_t qubit,
                     Complex phase0, Complex phase1);
    /// Swap of target pairs where the control bit is set.
    void (*apply_cnot)(std::span<Complex> amps, std::size_t control,
                       std::size_t target);
    /// out[k] = |amps[k]|^2.
    void (*probabilities)(std::span<const Complex> amps, std::span<double> out);
    double (*dot)(std::span<const double> a, std::span<const double> b);
    /// Sum of values[k] over indices k with bit `qubit` set.
    double (*masked_sum)(std::span<const double> values, std::size_t qubit);
    /// out[i] += gain * in[i].
    void (*multiply_accumulate)(std::span<double> out,
                                std::span<const double> in, double gain);
};

enum class Isa { scalar, avx2 };

const KernelTable &scalar_table();
/// nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable *avx2_table();

/// Table in use by the library.
const KernelTable &active();
Isa active_isa();
/// Forces a variant; returns false (and changes nothing) if unavailable.
bool select(Isa isa);

} // namespace vqh::kernels
