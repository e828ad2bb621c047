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

#include "degroup/filter.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

#include "degroup/error.hpp"
#include "degroup/simd/kernels.hpp"

namespace degroup {

double Kernel2d::sum() const { return std::accumulate(taps.begin(), taps.end(), 0.0); }

Kernel2d Kernel2d::flipped() const {
  Kernel2d out(height, width);
  for (std::size_t y = 0; y < height; ++y)
    for (std::size_t x = 0; x < width; ++x) out.at(height - 1 - y, width - 1 - x) = at(y, x);
  return out;
}

std::size_t reflect_index(std::ptrdiff_t i, std::size_t n) {
  if (n == 1) return 0;
  const auto period = static_cast<std::ptrdiff_t>(2 * (n - 1));
  std::ptrdiff_t m = i % period;
  if (m < 0) m += period;
  if (m >= static_cast<std::ptrdiff_t>(n)) m = period - m;
  return static_cast<std::size_t>(m);
}

Plane pad_reflect(const Plane& plane, std::size_t top, std::size_t bottom, std::size_t left,
                  std::size_t right) {
  Plane out(plane.height + top + bottom, plane.width + left + right);
  for (std::size_t y = 0; y < out.height; ++y) {
    const std::size_t sy =
        reflect_index(static_cast<std::ptrdiff_t>(y) - static_cast<std::ptrdiff_t>(top), plane.height);
    const double* src = plane.data.data() + sy * plane.width;
    double* dst = out.data.data() + y * out.width;
    for (std::size_t x = 0; x < out.width; ++x) {
      dst[x] = src[reflect_index(static_cast<std::ptrdiff_t>(x) - static_cast<std::ptrdiff_t>(left),
                                 plane.width)];
    }
  }
  return out;
}

Plane correlate(const Plane& plane, const Kernel2d& kernel) {
  if (kernel.height == 0 || kernel.width == 0) throw ShapeError("correlate: empty kernel");
  if (plane.data.empty()) throw ShapeError("correlate: empty plane");
  const std::size_t top = (kernel.height - 1) / 2;
  const std::size_t left = (kernel.width - 1) / 2;
  const Plane padded =
      pad_reflect(plane, top, kernel.height - 1 - top, left, kernel.width - 1 - left);
  Plane out(plane.height, plane.width);
  const std::span<const double> taps(kernel.taps);
  for (std::size_t y = 0; y < plane.height; ++y) {
    std::span<double> dst(out.data.data() + y * out.width, out.width);
    for (std::size_t ky = 0; ky < kernel.height; ++ky) {
      std::span<const double> src(padded.data.data() + (y + ky) * padded.width, padded.width);
      simd::correlate_row_accumulate(src, taps.subspan(ky * kernel.width, kernel.width), dst);
    }
  }
  return out;
}

Plane convolve(const Plane& plane, const Kernel2d& kernel) { return correlate(plane, kernel.flipped()); }

Plane transpose(const Plane& plane) {
  Plane out(plane.width, plane.height);
  for (std::size_t y = 0; y < plane.height; ++y)
    for (std::size_t x = 0; x < plane.width; ++x) out.at(x, y) = plane.at(y, x);
  return out;
}

namespace {

Plane correlate_rows(const Plane& plane, std::span<const double> taps) {
  if (taps.size() % 2 == 0) throw ShapeError("separable taps must have odd length");
  const std::size_t half = taps.size() / 2;
  const Plane padded = pad_reflect(plane, 0, 0, half, half);
  Plane out(plane.height, plane.width);
  for (std::size_t y = 0; y < plane.height; ++y) {
    simd::correlate_row_accumulate(
        std::span<const double>(padded.data.data() + y * padded.width, padded.width), taps,
        std::span<double>(out.data.data() + y * out.width, out.width));
  }
  return out;
}

}  // namespace

Plane correlate_separable(const Plane& plane, std::span<const double> row_taps,
                          std::span<const double> col_taps) {
  const Plane horizontal = correlate_rows(plane, row_taps);
  return transpose(correlate_rows(transpose(horizontal), col_taps));
}

namespace kernels {

std::vector<double> gaussian_1d(double sigma) {
  if (!(sigma > 0.0)) throw ValidationError("gaussian sigma must be > 0");
  const auto radius = static_cast<std::ptrdiff_t>(std::ceil(3.0 * sigma));
  std::vector<double> taps(static_cast<std::size_t>(2 * radius + 1));
  for (std::ptrdiff_t i = -radius; i <= radius; ++i) {
    taps[static_cast<std::size_t>(i + radius)] =
        std::exp(-static_cast<double>(i * i) / (2.0 * sigma * sigma));
  }
  const double total = std::accumulate(taps.begin(), taps.end(), 0.0);
  for (double& t : taps) t /= total;
  return taps;
}

Kernel2d disk(double radius) {
  if (!(radius > 0.0)) throw ValidationError("disk radius must be > 0");
  constexpr int kSub = 16;
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(radius));
  const auto size = static_cast<std::size_t>(2 * half + 1);
  Kernel2d k(size, size);
  const double r2 = radius * radius;
  for (std::ptrdiff_t y = -half; y <= half; ++y) {
    for (std::ptrdiff_t x = -half; x <= half; ++x) {
      int inside = 0;
      for (int sy = 0; sy < kSub; ++sy) {
        const double py = static_cast<double>(y) - 0.5 + (sy + 0.5) / kSub;
        for (int sx = 0; sx < kSub; ++sx) {
          const double px = static_cast<double>(x) - 0.5 + (sx + 0.5) / kSub;
          if (px * px + py * py <= r2) ++inside;
        }
      }
      k.at(static_cast<std::size_t>(y + half), static_cast<std::size_t>(x + half)) =
          static_cast<double>(inside) / (kSub * kSub);
    }
  }
  const double total = k.sum();
  for (double& t : k.taps) t /= total;
  return k;
}

Kernel2d motion(double length, double angle_deg) {
  if (!(length >= 1.0)) throw ValidationError("motion length must be >= 1");
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double half_len = (length - 1.0) / 2.0;
  const auto half = static_cast<std::ptrdiff_t>(std::ceil(half_len)) + 1;
  const auto size = static_cast<std::size_t>(2 * half + 1);
  Kernel2d k(size, size);
  const auto samples = static_cast<int>(std::max(2.0, std::ceil(length) * 8.0));
  for (int s = 0; s < samples; ++s) {
    const double t = samples == 1 ? 0.0 : -half_len + 2.0 * half_len * s / (samples - 1);
    const double px = t * std::cos(theta) + static_cast<double>(half);
    const double py = -t * std::sin(theta) + static_cast<double>(half);
    const double fx = std::floor(px);
    const double fy = std::floor(py);
    const double ax = px - fx;
    const double ay = py - fy;
    const auto ix = static_cast<std::size_t>(fx);
    const auto iy = static_cast<std::size_t>(fy);
    k.at(iy, ix) += (1 - ax) * (1 - ay);
    if (ix + 1 < size) k.at(iy, ix + 1) += ax * (1 - ay);
    if (iy + 1 < size) k.at(iy + 1, ix) += (1 - ax) * ay;
    if (ix + 1 < size && iy + 1 < size) k.at(iy + 1, ix + 1) += ax * ay;
  }
  const double total = k.sum();
  for (double& t : k.taps) t /= total;
  return k;
}

}  // namespace kernels

}  // namespace degroup
