// Copyright 2026 The degroup Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <string_view>

#include "degroup/error.hpp"
#include "degroup/simd/kernels.hpp"

namespace degroup::simd {

#if defined(DEGROUP_HAVE_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(DEGROUP_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable& table = [] () -> const KernelTable& {
    const char* pin = std::getenv("DEGROUP_SIMD");
    if (pin != nullptr && std::string_view(pin) == "scalar") return scalar_kernels();
    if (const KernelTable* avx2 = avx2_kernels()) return *avx2;
    return scalar_kernels();
  }();
  return table;
}

double sum_squared_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeError("sum_squared_diff: length mismatch");
  return active_kernels().sum_squared_diff(a.data(), b.data(), a.size());
}

Moments abs_moments(std::span<const double> x) {
  return active_kernels().abs_moments(x.data(), x.size());
}

void correlate_row_accumulate(std::span<const double> src, std::span<const double> taps,
                              std::span<double> dst) {
  if (taps.empty() || src.size() != dst.size() + taps.size() - 1) {
    throw ShapeError("correlate_row_accumulate: source must hold dst + taps - 1 values");
  }
  active_kernels().correlate_row_acc(src.data(), dst.size(), taps.data(), taps.size(),
                                     dst.data());
}

}  // namespace degroup::simd
