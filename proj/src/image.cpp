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

#include "degroup/image.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>

#include "degroup/error.hpp"
#include "degroup/simd/kernels.hpp"

namespace degroup {

namespace {

double clamp_unit(double v) {
  if (!(v > 0.0)) return 0.0;  // also maps NaN to 0
  return v < 1.0 ? v : 1.0;
}

void check_channels(std::size_t channels) {
  if (channels != 1 && channels != 3) {
    throw ShapeError("image must have 1 or 3 channels, got " + std::to_string(channels));
  }
}

}  // namespace

Image::Image(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels),
      data_(height * width * channels, clamp_unit(fill)) {
  check_channels(channels);
}

Image Image::from_samples(std::size_t height, std::size_t width, std::size_t channels,
                          std::vector<double> samples) {
  check_channels(channels);
  if (samples.size() != height * width * channels) {
    throw ShapeError("sample count does not match height x width x channels");
  }
  Image img;
  img.height_ = height;
  img.width_ = width;
  img.channels_ = channels;
  img.data_ = std::move(samples);
  for (double& v : img.data_) v = clamp_unit(v);
  return img;
}

Image Image::from_planes(std::span<const Plane> planes) {
  if (planes.empty()) throw ShapeError("from_planes: no planes");
  Image img(planes[0].height, planes[0].width, planes.size());
  for (std::size_t c = 0; c < planes.size(); ++c) img.set_channel(c, planes[c]);
  return img;
}

void Image::set(std::size_t y, std::size_t x, std::size_t c, double value) {
  data_[(y * width_ + x) * channels_ + c] = clamp_unit(value);
}

Plane Image::channel(std::size_t c) const {
  Plane p(height_, width_);
  for (std::size_t i = 0; i < height_ * width_; ++i) p.data[i] = data_[i * channels_ + c];
  return p;
}

void Image::set_channel(std::size_t c, const Plane& plane) {
  if (plane.height != height_ || plane.width != width_ || c >= channels_) {
    throw ShapeError("set_channel: plane does not match image");
  }
  for (std::size_t i = 0; i < height_ * width_; ++i) {
    data_[i * channels_ + c] = clamp_unit(plane.data[i]);
  }
}

double psnr(const Image& reference, const Image& candidate) {
  if (!reference.same_shape(candidate)) throw ShapeError("psnr: image shapes differ");
  if (reference.empty()) throw ShapeError("psnr: empty images");
  const double sse = simd::sum_squared_diff(reference.samples(), candidate.samples());
  const double mse = sse / static_cast<double>(reference.samples().size());
  if (mse == 0.0) return kPsnrCap;
  return 10.0 * std::log10(1.0 / mse);
}

PatchSet crop_patches(const Image& image, std::size_t patch_size, std::size_t stride,
                      std::string source_id) {
  if (patch_size == 0 || stride == 0) throw ShapeError("crop_patches: patch size and stride must be >= 1");
  if (patch_size > image.height() || patch_size > image.width()) {
    throw ShapeError("crop_patches: patch " + std::to_string(patch_size) + " larger than image " +
                     std::to_string(image.height()) + "x" + std::to_string(image.width()));
  }
  PatchSet set;
  set.source_id = std::move(source_id);
  const std::size_t c = image.channels();
  for (std::size_t top = 0; top + patch_size <= image.height(); top += stride) {
    for (std::size_t left = 0; left + patch_size <= image.width(); left += stride) {
      std::vector<double> buf;
      buf.reserve(patch_size * patch_size * c);
      for (std::size_t y = 0; y < patch_size; ++y) {
        const auto row = image.samples().subspan(((top + y) * image.width() + left) * c, patch_size * c);
        buf.insert(buf.end(), row.begin(), row.end());
      }
      set.patches.push_back(Image::from_samples(patch_size, patch_size, c, std::move(buf)));
    }
  }
  return set;
}

std::vector<unsigned char> to_bytes(const Image& image) {
  std::vector<unsigned char> out(image.samples().size());
  std::transform(image.samples().begin(), image.samples().end(), out.begin(),
                 [](double v) { return static_cast<unsigned char>(std::lround(v * 255.0)); });
  return out;
}

Image from_bytes(std::size_t height, std::size_t width, std::size_t channels,
                 std::span<const unsigned char> bytes) {
  std::vector<double> samples(bytes.size());
  std::transform(bytes.begin(), bytes.end(), samples.begin(),
                 [](unsigned char b) { return b / 255.0; });
  return Image::from_samples(height, width, channels, std::move(samples));
}

Image load_image(const std::filesystem::path& path) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(path, ec)) {
    throw FileError("no such image file: " + path.string());
  }
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&png, path.c_str())) {
    throw FormatError("unreadable PNG " + path.string() + ": " + png.message);
  }
  if (png.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&png);
    throw FormatError("unsupported bit depth (16-bit) in " + path.string());
  }
  const bool color = (png.format & PNG_FORMAT_FLAG_COLOR) != 0;
  png.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const std::size_t channels = color ? 3 : 1;
  std::vector<unsigned char> buffer(PNG_IMAGE_SIZE(png));
  if (!png_image_finish_read(&png, nullptr, buffer.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw FormatError("failed to decode " + path.string() + ": " + msg);
  }
  return from_bytes(png.height, png.width, channels, buffer);
}

void save_image(const Image& image, const std::filesystem::path& path) {
  if (image.empty()) throw ShapeError("save_image: empty image");
  png_image png{};
  png.version = PNG_IMAGE_VERSION;
  png.width = static_cast<png_uint_32>(image.width());
  png.height = static_cast<png_uint_32>(image.height());
  png.format = image.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const auto bytes = to_bytes(image);
  if (!png_image_write_to_file(&png, path.c_str(), 0, bytes.data(), 0, nullptr)) {
    std::string msg = png.message;
    png_image_free(&png);
    throw FileError("cannot write " + path.string() + ": " + msg);
  }
}

}  // namespace degroup
