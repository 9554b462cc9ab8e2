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

#include "vqh/kernels.hpp"

namespace vqh::kernels {

namespace {

void ry_scalar(std::span<Complex> amps, std::size_t qubit, double c,
               double s) {
    const std::size_t stride = std::size_t{1} << qubit;
    for (std::size_t base = 0; base < amps.size(); base += 2 * stride) {
        for (std::size_t j = base; j < base + stride; ++j) {
            const Complex a0 = amps[j];
            const Complex a1 = amps[j + stride];
            amps[j] = c * a0 - s * a1;
            amps[j + stride] = s * a0 + c * a1;
        }
    }
}

void rz_scalar(std::span<Complex> amps, std::size_t qubit, Complex phase0,
               Complex phase1) {
    for (std::size_t k = 0; k < amps.size(); ++k)
        amps[k] *= ((k >> qubit) & 1U) ? phase1 : phase0;
}

void cnot_scalar(std::span<Complex> amps, std::size_t control,
                 std::size_t target) {
    const std::size_t tbit = std::size_t{1} << target;
    for (std::size_t k = 0; k < amps.size(); ++k) {
        if (((k >> control) & 1U) && !(k & tbit))
            std::swap(amps[k], amps[k | tbit]);
    }
}

void probabilities_scalar(std::span<const Complex> amps,
                          std::span<double> out) {
    for (std::size_t k = 0; k < amps.size(); ++k)
        out[k] = std::norm(amps[k]);
}

double dot_scalar(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k)
        acc += a[k] * b[k];
    return acc;
}

double masked_sum_scalar(std::span<const double> values, std::size_t qubit) {
    double acc = 0.0;
    for (std::size_t k = 0; k < values.size(); ++k)
        if ((k >> qubit) & 1U)
            acc += values[k];
    return acc;
}

void multiply_accumulate_scalar(std::span<double> out,
                                std::span<const double> in, double gain) {
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] += gain * in[i];
}

constexpr KernelTable kScalar{
    "scalar",          ry_scalar,         rz_scalar,
    cnot_scalar,       probabilities_scalar, dot_scalar,
    masked_sum_scalar, multiply_accumulate_scalar,
};

} // namespace

const KernelTable &scalar_table() { return kScalar; }

} // namespace vqh::kernels
