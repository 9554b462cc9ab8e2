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

#include <atomic>
#include <cstdlib>
#include <string_view>

#include "vqh/kernels.hpp"

namespace vqh::kernels {

#if defined(VQH_HAVE_AVX2)
extern const KernelTable kAvx2Table;
#endif

namespace {

bool cpu_has_avx2() {
#if defined(VQH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

const KernelTable *initial_table() {
    const char *env = std::getenv("VQH_KERNELS");
    if (env && std::string_view(env) == "scalar")
        return &scalar_table();
    if (const auto *t = avx2_table())
        return t;
    return &scalar_table();
}

std::atomic<const KernelTable *> &current() {
    static std::atomic<const KernelTable *> table{initial_table()};
    return table;
}

} // namespace

const KernelTable *avx2_table() {
#if defined(VQH_HAVE_AVX2)
    static const bool supported = cpu_has_avx2();
    return supported ? &kAvx2Table : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable &active() {
    return *current().load(std::memory_order_acquire);
}

Isa active_isa() {
    return &active() == &scalar_table() ? Isa::scalar : Isa::avx2;
}

bool select(Isa isa) {
    const KernelTable *t =
        isa == Isa::scalar ? &scalar_table() : avx2_table();
    if (!t)
        return false;
    current().store(t, std::memory_order_release);
    return true;
}

} // namespace vqh::kernels
