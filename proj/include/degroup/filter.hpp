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

#include <cstddef>
#include <span>
#include <vector>

#include "degroup/image.hpp"

namespace degroup {

/// Dense 2-D filter taps, row-major. The anchor sits at ((h-1)/2, (w-1)/2).
struct Kernel2d {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> taps;

  Kernel2d() = default;
  Kernel2d(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), taps(h * w, fill) {}

  double& at(std::size_t y, std::size_t x) { return taps[y * width + x]; }
  double at(std::size_t y, std::size_t x) const { return taps[y * width + x]; }
  double sum() const;
  /// Returns the kernel rotated by 180 degrees.
  Kernel2d flipped() const;
};

/// Mirror index without edge repetition (d c b | a b c d | c b a), valid for
/// any offset, including pads wider than the signal.
std::size_t reflect_index(std::ptrdiff_t i, std::size_t n);

Plane pad_reflect(const Plane& plane, std::size_t top, std::size_t bottom, std::size_t left,
                  std::size_t right);

/// out(y, x) = sum k(i, j) * in(y + i - ay, x + j - ax) with reflect padding.
Plane correlate(const Plane& plane, const Kernel2d& kernel);
/// True convolution (kernel flipped).
Plane convolve(const Plane& plane, const Kernel2d& kernel);
/// Horizontal pass with `row_taps`, then vertical pass with `col_taps`
/// (odd lengths, centered), reflect padding.
Plane correlate_separable(const Plane& plane, std::span<const double> row_taps,
                          std::span<const double> col_taps);

Plane transpose(const Plane& plane);

/// Applies `op` to every channel of `image`.
template <typename Op>
Image map_channels(const Image& image, Op op) {
  std::vector<Plane> planes;
  planes.reserve(image.channels());
  for (std::size_t c = 0; c < image.channels(); ++c) planes.push_back(op(image.channel(c)));
  return Image::from_planes(planes);
}

namespace kernels {

/// Normalized 1-D Gaussian of length 2*ceil(3 sigma)+1.
std::vector<double> gaussian_1d(double sigma);
/// Normalized disk: each tap weighted by its supersampled area inside the circle.
Kernel2d disk(double radius);
/// Normalized linear motion kernel of `length` pixels along `angle_deg`
/// (counter-clockwise from the +x axis), bilinearly rasterized.
Kernel2d motion(double length, double angle_deg);

}  // namespace kernels

}  // namespace degroup
