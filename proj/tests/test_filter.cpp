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
#include <numeric>
#include <random>

#include "degroup/filter.hpp"
#include "degroup/simd/kernels.hpp"
#include "doctest.h"

using namespace degroup;

namespace {

Plane random_plane(std::size_t h, std::size_t w, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Plane p(h, w);
  for (auto& v : p.data) v = u(rng);
  return p;
}

Kernel2d random_kernel(std::size_t h, std::size_t w, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Kernel2d k(h, w);
  for (auto& v : k.taps) v = u(rng);
  return k;
}

// Direct definition with reflect borders.
Plane naive_correlate(const Plane& in, const Kernel2d& k) {
  Plane out(in.height, in.width);
  const auto ay = static_cast<std::ptrdiff_t>((k.height - 1) / 2);
  const auto ax = static_cast<std::ptrdiff_t>((k.width - 1) / 2);
  for (std::size_t y = 0; y < in.height; ++y)
    for (std::size_t x = 0; x < in.width; ++x) {
      double acc = 0.0;
      for (std::size_t i = 0; i < k.height; ++i)
        for (std::size_t j = 0; j < k.width; ++j) {
          const auto yy = reflect_index(static_cast<std::ptrdiff_t>(y + i) - ay, in.height);
          const auto xx = reflect_index(static_cast<std::ptrdiff_t>(x + j) - ax, in.width);
          acc += k.at(i, j) * in.at(yy, xx);
        }
      out.at(y, x) = acc;
    }
  return out;
}

double max_abs_diff(const Plane& a, const Plane& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) m = std::max(m, std::abs(a.data[i] - b.data[i]));
  return m;
}

}  // namespace

TEST_CASE("reflect_index mirrors without edge repetition") {
  CHECK(reflect_index(-1, 4) == 1);
  CHECK(reflect_index(-3, 4) == 3);
  CHECK(reflect_index(4, 4) == 2);
  CHECK(reflect_index(5, 4) == 1);
  CHECK(reflect_index(0, 1) == 0);
  CHECK(reflect_index(-7, 1) == 0);
  for (std::ptrdiff_t i = -50; i < 50; ++i) CHECK(reflect_index(i, 3) < 3);
  CHECK(reflect_index(-9, 4) == 3);
}

TEST_CASE("correlate matches the direct definition") {
  const Plane in = random_plane(23, 31, 1);
  for (auto [h, w] : {std::pair<std::size_t, std::size_t>{3, 3}, {5, 1}, {1, 7}, {4, 6}, {9, 9}, {27, 3}}) {
    const Kernel2d k = random_kernel(h, w, static_cast<unsigned>(h * 31 + w));
    CHECK(max_abs_diff(correlate(in, k), naive_correlate(in, k)) < 1e-12);
    CHECK(max_abs_diff(convolve(in, k), naive_correlate(in, k.flipped())) < 1e-12);
  }
}

TEST_CASE("separable correlation equals the dense outer product") {
  const Plane in = random_plane(19, 26, 2);
  const auto taps = kernels::gaussian_1d(1.7);
  Kernel2d k(taps.size(), taps.size());
  for (std::size_t i = 0; i < taps.size(); ++i)
    for (std::size_t j = 0; j < taps.size(); ++j) k.at(i, j) = taps[i] * taps[j];
  CHECK(max_abs_diff(correlate_separable(in, taps, taps), correlate(in, k)) < 1e-12);
  CHECK(max_abs_diff(transpose(transpose(in)), in) == 0.0);
}

TEST_CASE("blur kernels are normalized and fix constants") {
  for (double s : {0.5, 1.0, 3.0}) {
    const auto g = kernels::gaussian_1d(s);
    CHECK(g.size() == 2 * static_cast<std::size_t>(std::ceil(3 * s)) + 1);
    CHECK(std::abs(std::accumulate(g.begin(), g.end(), 0.0) - 1.0) < 1e-12);
  }
  for (double r : {1.0, 2.5, 6.0}) CHECK(std::abs(kernels::disk(r).sum() - 1.0) < 1e-12);
  for (double len : {3.0, 7.0, 21.0})
    for (double ang : {0.0, 33.0, 90.0, 145.0}) CHECK(std::abs(kernels::motion(len, ang).sum() - 1.0) < 1e-12);

  const Plane flat(20, 20, 0.37);
  const Plane out = correlate(flat, kernels::disk(4.0));
  CHECK(max_abs_diff(out, flat) < 1e-9);
}

TEST_CASE("map_channels applies per channel") {
  Image img(4, 4, 3, 0.2);
  img.set(1, 1, 2, 0.9);
  const Image out = map_channels(img, [](const Plane& p) {
    Plane q = p;
    for (auto& v : q.data) v *= 0.5;
    return q;
  });
  CHECK(out.at(1, 1, 2) == doctest::Approx(0.45));
  CHECK(out.at(0, 0, 0) == doctest::Approx(0.1));
}

TEST_CASE("simd kernels agree with the scalar reference") {
  const simd::KernelTable& scalar = simd::scalar_kernels();
  const simd::KernelTable* avx2 = simd::avx2_kernels();
  if (avx2 == nullptr) {
    MESSAGE("AVX2 variant unavailable; only the scalar path is exercised");
    return;
  }
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 16u, 33u, 1000u, 4099u}) {
    std::vector<double> a(n);
    std::vector<double> b(n);
    for (auto& v : a) v = u(rng);
    for (auto& v : b) v = u(rng);
    const double ref = scalar.sum_squared_diff(a.data(), b.data(), n);
    CHECK(std::abs(avx2->sum_squared_diff(a.data(), b.data(), n) - ref) <= 1e-12 * std::max(1.0, ref));
    const auto m_ref = scalar.abs_moments(a.data(), n);
    const auto m = avx2->abs_moments(a.data(), n);
    CHECK(std::abs(m.sum_abs - m_ref.sum_abs) <= 1e-12 * std::max(1.0, m_ref.sum_abs));
    CHECK(std::abs(m.sum_sq - m_ref.sum_sq) <= 1e-12 * std::max(1.0, m_ref.sum_sq));

    for (std::size_t taps_n : {1u, 3u, 8u, 13u}) {
      std::vector<double> taps(taps_n);
      for (auto& v : taps) v = u(rng);
      std::vector<double> src(n + taps_n - 1);
      for (auto& v : src) v = u(rng);
      std::vector<double> d1(n, 0.25);
      std::vector<double> d2(n, 0.25);
      scalar.correlate_row_acc(src.data(), n, taps.data(), taps_n, d1.data());
      avx2->correlate_row_acc(src.data(), n, taps.data(), taps_n, d2.data());
      CHECK(d1 == d2);
    }
  }
}

TEST_CASE("active kernel table is usable through the span wrappers") {
  const std::vector<double> a = {1.0, -2.0, 3.0};
  const std::vector<double> b = {0.0, 0.0, 1.0};
  CHECK(simd::sum_squared_diff(a, b) == doctest::Approx(9.0));
  const auto m = simd::abs_moments(a);
  CHECK(m.sum_abs == doctest::Approx(6.0));
  CHECK(m.sum_sq == doctest::Approx(14.0));
  CHECK(!simd::active_kernels().name.empty());
}
