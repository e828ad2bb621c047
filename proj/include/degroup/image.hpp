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
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace degroup {

/// Single-channel, row-major working buffer. Unlike Image, values are not clamped.
struct Plane {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<double> data;

  Plane() = default;
  Plane(std::size_t h, std::size_t w, double fill = 0.0) : height(h), width(w), data(h * w, fill) {}

  double& at(std::size_t y, std::size_t x) { return data[y * width + x]; }
  double at(std::size_t y, std::size_t x) const { return data[y * width + x]; }
};

/// Raster of unit-interval intensities, row-major with interleaved channels
/// (HWC). Every write clamps to [0, 1].
class Image {
 public:
  Image() = default;
  Image(std::size_t height, std::size_t width, std::size_t channels, double fill = 0.0);

  /// Takes ownership of `samples` (HWC order), clamping each value.
  static Image from_samples(std::size_t height, std::size_t width, std::size_t channels,
                            std::vector<double> samples);
  static Image from_planes(std::span<const Plane> planes);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  std::size_t channels() const noexcept { return channels_; }
  std::size_t pixel_count() const noexcept { return height_ * width_; }
  bool empty() const noexcept { return data_.empty(); }

  double at(std::size_t y, std::size_t x, std::size_t c) const {
    return data_[(y * width_ + x) * channels_ + c];
  }
  void set(std::size_t y, std::size_t x, std::size_t c, double value);

  std::span<const double> samples() const noexcept { return data_; }

  Plane channel(std::size_t c) const;
  void set_channel(std::size_t c, const Plane& plane);

  bool same_shape(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_ && channels_ == other.channels_;
  }

  friend bool operator==(const Image&, const Image&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::size_t channels_ = 0;
  std::vector<double> data_;
};

struct PatchSet {
  std::vector<Image> patches;
  std::string source_id;
};

inline constexpr double kPsnrCap = 100.0;

/// PSNR against peak 1.0, mean squared error taken over all samples of all
/// channels. Identical inputs give kPsnrCap.
double psnr(const Image& reference, const Image& candidate);

/// Every fully contained patch on the stride grid, row-major by top-left corner.
PatchSet crop_patches(const Image& image, std::size_t patch_size, std::size_t stride,
                      std::string source_id = {});

/// 8-bit grayscale or RGB PNG. Alpha is composited away; 16-bit files are rejected.
Image load_image(const std::filesystem::path& path);
void save_image(const Image& image, const std::filesystem::path& path);

/// Round-to-nearest 8-bit quantization of the HWC samples.
std::vector<unsigned char> to_bytes(const Image& image);
Image from_bytes(std::size_t height, std::size_t width, std::size_t channels,
                 std::span<const unsigned char> bytes);

}  // namespace degroup
