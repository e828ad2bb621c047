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

#pragma once

// Data-parallel inner loops. Each kernel has a scalar reference version and,
// on x86-64, an AVX2 version chosen at runtime. The row correlation kernel
// evaluates taps in the same order on every path, so its results are
// bit-identical across variants; the reductions differ only in summation order.

#include <cstddef>
#include <span>
#include <string_view>

namespace degroup::simd {

struct Moments {
  double sum_abs = 0.0;
  double sum_sq = 0.0;
};

struct KernelTable {
  std::string_view name;
  double (*sum_squared_diff)(const double* a, const double* b, std::size_t n);
  Moments (*abs_moments)(const double* x, std::size_t n);
  // dst[i] += sum_j taps[j] * src[i + j] for i in [0, n_out). src holds n_out + n_taps - 1 values.
  void (*correlate_row_acc)(const double* src, std::size_t n_out, const double* taps,
                            std::size_t n_taps, double* dst);
};

const KernelTable& scalar_kernels();

/// AVX2 table, or nullptr when not compiled in or unsupported by this CPU.
const KernelTable* avx2_kernels();

/// Best available table. Setting DEGROUP_SIMD=scalar in the environment pins
/// the scalar reference.
const KernelTable& active_kernels();

double sum_squared_diff(std::span<const double> a, std::span<const double> b);
Moments abs_moments(std::span<const double> x);
void correlate_row_accumulate(std::span<const double> src, std::span<const double> taps,
                              std::span<double> dst);

}  // namespace degroup::simd
