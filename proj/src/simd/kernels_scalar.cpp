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

#include <cmath>

#include "degroup/simd/kernels.hpp"

namespace degroup::simd {

namespace {

double sum_squared_diff_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

Moments abs_moments_scalar(const double* x, std::size_t n) {
  Moments m;
  for (std::size_t i = 0; i < n; ++i) {
    m.sum_abs += std::fabs(x[i]);
    m.sum_sq += x[i] * x[i];
  }
  return m;
}

void correlate_row_acc_scalar(const double* src, std::size_t n_out, const double* taps,
                              std::size_t n_taps, double* dst) {
  for (std::size_t i = 0; i < n_out; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_taps; ++j) s += taps[j] * src[i + j];
    dst[i] += s;
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", &sum_squared_diff_scalar, &abs_moments_scalar,
                                 &correlate_row_acc_scalar};
  return table;
}

}  // namespace degroup::simd
