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

#include "degroup/features.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numbers>
#include <numeric>

#include "degroup/error.hpp"
#include "degroup/rng.hpp"

namespace degroup {

static_assert(std::endian::native == std::endian::little, "DDRF I/O assumes a little-endian host");

std::uint64_t FeatureTensor::expected_size() const {
  if (dims.empty()) return 0;
  return std::accumulate(dims.begin(), dims.end(), std::uint64_t{1}, std::multiplies<>());
}

void FeatureTensor::validate() const {
  if (dims.empty()) throw ValidationError("feature tensor has no dimensions");
  for (auto d : dims)
    if (d == 0) throw ValidationError("feature tensor has a zero-length dimension");
  if (expected_size() != data.size()) {
    throw ValidationError("feature tensor holds " + std::to_string(data.size()) + " values, dims imply " +
                          std::to_string(expected_size()));
  }
  for (float v : data)
    if (!std::isfinite(v)) throw ValidationError("feature tensor contains non-finite values");
}

namespace {

void normalize_l1(Kernel2d& k) {
  double l1 = 0.0;
  for (double t : k.taps) l1 += std::fabs(t);
  for (double& t : k.taps) t /= l1;
}

void remove_mean(Kernel2d& k) {
  const double mean = k.sum() / static_cast<double>(k.taps.size());
  for (double& t : k.taps) t -= mean;
}

template <typename F>
Kernel2d sample_kernel(int radius, F f) {
  const auto size = static_cast<std::size_t>(2 * radius + 1);
  Kernel2d k(size, size);
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x)
      k.at(static_cast<std::size_t>(y + radius), static_cast<std::size_t>(x + radius)) = f(x, y);
  return k;
}

Plane pool2x2(const Plane& p) {
  Plane out(p.height / 2, p.width / 2);
  for (std::size_t y = 0; y < out.height; ++y)
    for (std::size_t x = 0; x < out.width; ++x)
      out.at(y, x) = 0.25 * (p.at(2 * y, 2 * x) + p.at(2 * y, 2 * x + 1) + p.at(2 * y + 1, 2 * x) +
                             p.at(2 * y + 1, 2 * x + 1));
  return out;
}

}  // namespace

std::vector<BankFilter> make_filter_bank(std::uint64_t bank_seed) {
  std::vector<BankFilter> bank;
  bank.reserve(kFilterBankSize);
  constexpr double pi = std::numbers::pi;

  for (int o = 0; o < 8; ++o) {
    const double theta = o * pi / 8.0;
    constexpr double s = 1.0;
    Kernel2d k = sample_kernel(3, [&](int x, int y) {
      const double u = x * std::cos(theta) + y * std::sin(theta);
      return -u / (s * s) * std::exp(-(x * x + y * y) / (2 * s * s));
    });
    remove_mean(k);
    normalize_l1(k);
    bank.push_back({FilterFamily::kDerivative, std::move(k)});
  }

  struct GaborScale {
    double sigma;
    double wavelength;
    int radius;
  };
  for (const GaborScale g : {GaborScale{1.2, 3.5, 4}, GaborScale{2.0, 6.0, 6}}) {
    for (int o = 0; o < 4; ++o) {
      const double theta = o * pi / 4.0;
      Kernel2d k = sample_kernel(g.radius, [&](int x, int y) {
        const double u = x * std::cos(theta) + y * std::sin(theta);
        return std::exp(-(x * x + y * y) / (2 * g.sigma * g.sigma)) * std::cos(2 * pi * u / g.wavelength);
      });
      remove_mean(k);
      normalize_l1(k);
      bank.push_back({FilterFamily::kGabor, std::move(k)});
    }
  }

  for (const double s : {0.7, 1.0, 1.4, 2.0}) {
    const int radius = static_cast<int>(std::ceil(3 * s));
    Kernel2d k = sample_kernel(radius, [&](int x, int y) {
      const double r2 = x * x + y * y;
      return (r2 - 2 * s * s) / (s * s * s * s) * std::exp(-r2 / (2 * s * s));
    });
    remove_mean(k);
    normalize_l1(k);
    bank.push_back({FilterFamily::kLaplacian, std::move(k)});
  }

  // Balanced signs (18 of each on 6x6) keep the DC response at zero.
  CounterRng rng(bank_seed, stream_id("filter_bank"));
  for (int r = 0; r < 4; ++r) {
    Kernel2d k(6, 6);
    for (std::size_t i = 0; i < k.taps.size(); ++i) k.taps[i] = i < 18 ? 1.0 : -1.0;
    for (std::size_t i = k.taps.size() - 1; i > 0; --i) std::swap(k.taps[i], k.taps[rng.below(i + 1)]);
    normalize_l1(k);
    bank.push_back({FilterFamily::kRandom, std::move(k)});
  }
  return bank;
}

std::string builtin_extractor_id(std::uint64_t bank_seed) {
  return "builtin-v1:bank_seed=" + std::to_string(bank_seed);
}

FeatureTensor extract_builtin(std::span<const Image> images, std::uint64_t bank_seed) {
  if (images.empty()) throw ShapeError("extract_builtin: no images");
  const Image& first = images.front();
  for (const auto& img : images) {
    if (!img.same_shape(first)) throw ShapeError("extract_builtin: images have mixed dimensions");
  }
  if (first.height() < 2 || first.width() < 2) throw ShapeError("extract_builtin: image too small to pool");
  const auto bank = make_filter_bank(bank_seed);
  const std::size_t out_h = first.height() / 2;
  const std::size_t out_w = first.width() / 2;
  const std::size_t feature_channels = first.channels() * bank.size();

  FeatureTensor t;
  t.dims = {images.size(), feature_channels, out_h, out_w};
  t.extractor_id = builtin_extractor_id(bank_seed);
  t.data.resize(t.expected_size());
  std::size_t offset = 0;
  for (const auto& img : images) {
    for (std::size_t c = 0; c < img.channels(); ++c) {
      const Plane plane = img.channel(c);
      for (const auto& filter : bank) {
        Plane response = correlate(plane, filter.kernel);
        for (double& v : response.data) v = std::fabs(v);
        const Plane pooled = pool2x2(response);
        std::transform(pooled.data.begin(), pooled.data.end(), t.data.begin() + static_cast<std::ptrdiff_t>(offset),
                       [](double v) { return static_cast<float>(v); });
        offset += pooled.data.size();
      }
    }
  }
  return t;
}

FeatureTensor concatenate(std::span<const FeatureTensor> tensors) {
  if (tensors.empty()) throw ShapeError("concatenate: no tensors");
  FeatureTensor out;
  out.dims = tensors.front().dims;
  out.extractor_id = tensors.front().extractor_id;
  out.dims[0] = 0;
  for (const auto& t : tensors) {
    if (t.dims.size() != out.dims.size() || !std::equal(t.dims.begin() + 1, t.dims.end(), out.dims.begin() + 1)) {
      throw ShapeError("concatenate: trailing dimensions differ");
    }
    out.dims[0] += t.dims[0];
    out.data.insert(out.data.end(), t.data.begin(), t.data.end());
  }
  return out;
}

namespace {

template <typename T>
void put(std::vector<std::byte>& out, T value) {
  const auto* p = reinterpret_cast<const std::byte*>(&value);
  out.insert(out.end(), p, p + sizeof(T));
}

class Reader {
 public:
  explicit Reader(std::span<const std::byte> bytes) : bytes_(bytes) {}

  template <typename T>
  T get(const char* what) {
    if (remaining() < sizeof(T)) throw FormatError(std::string("DDRF truncated while reading ") + what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }

  std::span<const std::byte> take(std::size_t n, const char* what) {
    if (remaining() < n) throw FormatError(std::string("DDRF truncated while reading ") + what);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::byte> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::byte> encode_ddrf(const FeatureTensor& tensor) {
  tensor.validate();
  std::vector<std::byte> out;
  out.reserve(12 + 8 * tensor.dims.size() + 4 * tensor.data.size() + 4 + tensor.extractor_id.size());
  for (char c : std::string_view("DDRF")) out.push_back(static_cast<std::byte>(c));
  put<std::uint32_t>(out, kDdrfVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.dims.size()));
  for (auto d : tensor.dims) put<std::uint64_t>(out, d);
  const auto* payload = reinterpret_cast<const std::byte*>(tensor.data.data());
  out.insert(out.end(), payload, payload + tensor.data.size() * sizeof(float));
  if (!tensor.extractor_id.empty()) {
    put<std::uint32_t>(out, static_cast<std::uint32_t>(tensor.extractor_id.size()));
    for (char c : tensor.extractor_id) out.push_back(static_cast<std::byte>(c));
  }
  return out;
}

FeatureTensor decode_ddrf(std::span<const std::byte> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4, "magic");
  if (std::memcmp(magic.data(), "DDRF", 4) != 0) throw FormatError("bad DDRF magic");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kDdrfVersion) throw FormatError("unsupported DDRF version " + std::to_string(version));
  const auto ndim = r.get<std::uint32_t>("ndim");
  if (ndim == 0 || ndim > 8) throw FormatError("DDRF ndim out of range: " + std::to_string(ndim));
  FeatureTensor t;
  std::uint64_t count = 1;
  for (std::uint32_t i = 0; i < ndim; ++i) {
    const auto d = r.get<std::uint64_t>("dims");
    if (d == 0) throw FormatError("DDRF has a zero-length dimension");
    if (count > (std::uint64_t{1} << 40) / d) throw FormatError("DDRF dimensions too large");
    count *= d;
    t.dims.push_back(d);
  }
  const auto payload = r.take(static_cast<std::size_t>(count) * sizeof(float), "payload");
  t.data.resize(static_cast<std::size_t>(count));
  std::memcpy(t.data.data(), payload.data(), payload.size());
  if (r.remaining() > 0) {
    const auto len = r.get<std::uint32_t>("metadata length");
    const auto meta = r.take(len, "metadata");
    t.extractor_id.assign(reinterpret_cast<const char*>(meta.data()), meta.size());
    if (r.remaining() != 0) throw FormatError("DDRF has trailing bytes after metadata");
  }
  for (float v : t.data)
    if (!std::isfinite(v)) throw FormatError("DDRF payload contains non-finite values");
  return t;
}

void write_features(const FeatureTensor& tensor, const std::filesystem::path& path) {
  const auto bytes = encode_ddrf(tensor);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FileError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FileError("write failed: " + path.string());
}

FeatureTensor ingest_features(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path.string());
  std::vector<char> raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    FeatureTensor t = decode_ddrf(std::as_bytes(std::span(raw)));
    t.source = path.string();
    return t;
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

SampleVector center_and_flatten(const FeatureTensor& tensor) {
  if (tensor.data.empty()) throw ValidationError("center_and_flatten: empty tensor");
  SampleVector s;
  s.values.assign(tensor.data.begin(), tensor.data.end());
  for (double v : s.values)
    if (!std::isfinite(v)) throw ValidationError("center_and_flatten: non-finite value");
  const double n = static_cast<double>(s.values.size());
  const double mean = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  for (double& v : s.values) v -= mean;
  // A second pass removes the rounding residue of the first mean.
  const double residue = std::accumulate(s.values.begin(), s.values.end(), 0.0) / n;
  for (double& v : s.values) v -= residue;
  return s;
}

}  // namespace degroup
