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

// Compiled with -mavx2 -mfma. Nothing here may run before dispatch has
// confirmed CPU support.

#include <immintrin.h>

#include "vqh/kernels.hpp"

namespace vqh::kernels {

namespace {

// std::complex<double> is layout-compatible with double[2].
inline double *as_doubles(std::span<Complex> amps) {
    return reinterpret_cast<double *>(amps.data());
}
inline const double *as_doubles(std::span<const Complex> amps) {
    return reinterpret_cast<const double *>(amps.data());
}

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

// Complex product of two packed complexes with per-lane phases
// (pr = real parts, pi = imaginary parts, each duplicated per complex).
inline __m256d cmul(__m256d v, __m256d pr, __m256d pi) {
    const __m256d swapped = _mm256_permute_pd(v, 0b0101);
    return _mm256_fmaddsub_pd(v, pr, _mm256_mul_pd(swapped, pi));
}

void ry_avx2(std::span<Complex> amps, std::size_t qubit, double c, double s) {
    double *d = as_doubles(amps);
    const std::size_t size = amps.size();
    if (qubit == 0) {
        // One register holds the pair (a0, a1).
        const __m256d vc = _mm256_set1_pd(c);
        const __m256d vs = _mm256_setr_pd(-s, -s, s, s);
        for (std::size_t k = 0; k < size; k += 2) {
            const __m256d v = _mm256_loadu_pd(d + 2 * k);
            const __m256d sw = _mm256_permute2f128_pd(v, v, 0x01);
            _mm256_storeu_pd(d + 2 * k,
                             _mm256_fmadd_pd(vc, v, _mm256_mul_pd(vs, sw)));
        }
        return;
    }
    const std::size_t stride = std::size_t{1} << qubit;
    const __m256d vc = _mm256_set1_pd(c);
    const __m256d vs = _mm256_set1_pd(s);
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        double *lo = d + 2 * base;
        double *hi = d + 2 * (base + stride);
        for (std::size_t j = 0; j < 2 * stride; j += 4) {
            const __m256d a0 = _mm256_loadu_pd(lo + j);
            const __m256d a1 = _mm256_loadu_pd(hi + j);
            _mm256_storeu_pd(lo + j,
                             _mm256_fnmadd_pd(vs, a1, _mm256_mul_pd(vc, a0)));
            _mm256_storeu_pd(hi + j,
                             _mm256_fmadd_pd(vs, a0, _mm256_mul_pd(vc, a1)));
        }
    }
}

void rz_avx2(std::span<Complex> amps, std::size_t qubit, Complex phase0,
             Complex phase1) {
    double *d = as_doubles(amps);
    const std::size_t size = amps.size();
    if (qubit == 0) {
        const __m256d pr = _mm256_setr_pd(phase0.real(), phase0.real(),
                                          phase1.real(), phase1.real());
        const __m256d pi = _mm256_setr_pd(phase0.imag(), phase0.imag(),
                                          phase1.imag(), phase1.imag());
        for (std::size_t k = 0; k < size; k += 2)
            _mm256_storeu_pd(d + 2 * k,
                             cmul(_mm256_loadu_pd(d + 2 * k), pr, pi));
        return;
    }
    const std::size_t stride = std::size_t{1} << qubit;
    const __m256d p0r = _mm256_set1_pd(phase0.real());
    const __m256d p0i = _mm256_set1_pd(phase0.imag());
    const __m256d p1r = _mm256_set1_pd(phase1.real());
    const __m256d p1i = _mm256_set1_pd(phase1.imag());
    for (std::size_t base = 0; base < size; base += 2 * stride) {
        double *lo = d + 2 * base;
        double *hi = d + 2 * (base + stride);
        for (std::size_t j = 0; j < 2 * stride; j += 4) {
            _mm256_storeu_pd(lo + j, cmul(_mm256_loadu_pd(lo + j), p0r, p0i));
            _mm256_storeu_pd(hi + j, cmul(_mm256_loadu_pd(hi + j), p1r, p1i));
        }
    }
}

void cnot_avx2(std::span<Complex> amps, std::size_t control,
               std::size_t target) {
    const std::size_t tbit = std::size_t{1} << target;
    if (control == 0 || target == 0) {
        for (std::size_t k = 0; k < amps.size(); ++k)
            if (((k >> control) & 1U) && !(k & tbit))
                std::swap(amps[k], amps[k | tbit]);
        return;
    }
    // Neighbouring indices 2m, 2m+1 share both bits: move them together.
    double *d = as_doubles(amps);
    for (std::size_t k = 0; k < amps.size(); k += 2) {
        if (((k >> control) & 1U) && !(k & tbit)) {
            double *a = d + 2 * k;
            double *b = d + 2 * (k | tbit);
            const __m256d va = _mm256_loadu_pd(a);
            const __m256d vb = _mm256_loadu_pd(b);
            _mm256_storeu_pd(a, vb);
            _mm256_storeu_pd(b, va);
        }
    }
}

void probabilities_avx2(std::span<const Complex> amps, std::span<double> out) {
    const double *d = as_doubles(amps);
    const std::size_t size = amps.size();
    std::size_t k = 0;
    for (; k + 4 <= size; k += 4) {
        const __m256d a = _mm256_loadu_pd(d + 2 * k);
        const __m256d b = _mm256_loadu_pd(d + 2 * k + 4);
        // hadd gives (|a0|, |b0|, |a1|, |b1|); restore index order.
        const __m256d h =
            _mm256_hadd_pd(_mm256_mul_pd(a, a), _mm256_mul_pd(b, b));
        _mm256_storeu_pd(out.data() + k,
                         _mm256_permute4x64_pd(h, _MM_SHUFFLE(3, 1, 2, 0)));
    }
    for (; k < size; ++k)
        out[k] = std::norm(amps[k]);
}

double dot_avx2(std::span<const double> a, std::span<const double> b) {
    const std::size_t size = a.size();
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 8 <= size; k += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + k),
                               _mm256_loadu_pd(b.data() + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a.data() + k + 4),
                               _mm256_loadu_pd(b.data() + k + 4), acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; k < size; ++k)
        acc += a[k] * b[k];
    return acc;
}

double masked_sum_avx2(std::span<const double> values, std::size_t qubit) {
    const std::size_t stride = std::size_t{1} << qubit;
    if (stride < 4) {
        double acc = 0.0;
        for (std::size_t k = 0; k < values.size(); ++k)
            if ((k >> qubit) & 1U)
                acc += values[k];
        return acc;
    }
    __m256d acc = _mm256_setzero_pd();
    for (std::size_t base = stride; base < values.size(); base += 2 * stride)
        for (std::size_t j = base; j < base + stride; j += 4)
            acc = _mm256_add_pd(acc, _mm256_loadu_pd(values.data() + j));
    return hsum(acc);
}

void multiply_accumulate_avx2(std::span<double> out,
                              std::span<const double> in, double gain) {
    const __m256d g = _mm256_set1_pd(gain);
    std::size_t i = 0;
    for (; i + 4 <= out.size(); i += 4)
        _mm256_storeu_pd(out.data() + i,
                         _mm256_fmadd_pd(g, _mm256_loadu_pd(in.data() + i),
                                         _mm256_loadu_pd(out.data() + i)));
    for (; i < out.size(); ++i)
        out[i] += gain * in[i];
}

} // namespace

extern const KernelTable kAvx2Table;
const KernelTable kAvx2Table{
    "avx2",          ry_avx2,         rz_avx2,
    cnot_avx2,       probabilities_avx2, dot_avx2,
    masked_sum_avx2, multiply_accumulate_avx2,
};

} // namespace vqh::kernels
