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

#include <immintrin.h>

#include <cmath>

#include "degroup/simd/kernels.hpp"

namespace degroup::simd {

namespace {

double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double sum_squared_diff_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4));
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(d0, d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(d1, d1));
  }
  double total = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

Moments abs_moments_avx2(const double* x, std::size_t n) {
  const __m256d sign_mask = _mm256_set1_pd(-0.0);
  __m256d abs_acc = _mm256_setzero_pd();
  __m256d sq_acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d v = _mm256_loadu_pd(x + i);
    abs_acc = _mm256_add_pd(abs_acc, _mm256_andnot_pd(sign_mask, v));
    sq_acc = _mm256_add_pd(sq_acc, _mm256_mul_pd(v, v));
  }
  Moments m{hsum(abs_acc), hsum(sq_acc)};
  for (; i < n; ++i) {
    m.sum_abs += std::fabs(x[i]);
    m.sum_sq += x[i] * x[i];
  }
  return m;
}

void correlate_row_acc_avx2(const double* src, std::size_t n_out, const double* taps,
                            std::size_t n_taps, double* dst) {
  std::size_t i = 0;
  for (; i + 8 <= n_out; i += 8) {
    __m256d s0 = _mm256_setzero_pd();
    __m256d s1 = _mm256_setzero_pd();
    for (std::size_t j = 0; j < n_taps; ++j) {
      const __m256d t = _mm256_broadcast_sd(taps + j);
      s0 = _mm256_add_pd(s0, _mm256_mul_pd(t, _mm256_loadu_pd(src + i + j)));
      s1 = _mm256_add_pd(s1, _mm256_mul_pd(t, _mm256_loadu_pd(src + i + j + 4)));
    }
    _mm256_storeu_pd(dst + i, _mm256_add_pd(_mm256_loadu_pd(dst + i), s0));
    _mm256_storeu_pd(dst + i + 4, _mm256_add_pd(_mm256_loadu_pd(dst + i + 4), s1));
  }
  for (; i < n_out; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_taps; ++j) s += taps[j] * src[i + j];
    dst[i] += s;
  }
}

}  // namespace

const KernelTable& avx2_kernel_table() {
  static const KernelTable table{"avx2", &sum_squared_diff_avx2, &abs_moments_avx2,
                                 &correlate_row_acc_avx2};
  return table;
}

}  // namespace degroup::simd
