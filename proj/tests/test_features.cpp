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
#include <cstring>
#include <fstream>

#include "degroup/degrade.hpp"
#include "degroup/error.hpp"
#include "degroup/features.hpp"
#include "degroup/rng.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace degroup;

namespace {

FeatureTensor small_tensor() {
  FeatureTensor t;
  t.dims = {2, 3};
  t.data = {1.0f, -2.5f, 3.25f, 0.0f, 1e-3f, -7.0f};
  return t;
}

template <typename T>
void poke(std::vector<std::byte>& bytes, std::size_t offset, T value) {
  std::memcpy(bytes.data() + offset, &value, sizeof(T));
}

Image noise_image(std::size_t n, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  Image img(n, n, 1);
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t x = 0; x < n; ++x) img.set(y, x, 0, 0.5 + 0.15 * rng.normal());
  return img;
}

double mean_abs_channels(const FeatureTensor& t, std::size_t first, std::size_t last) {
  const std::size_t plane = t.dims[2] * t.dims[3];
  double sum = 0.0;
  for (std::size_t c = first; c < last; ++c)
    for (std::size_t i = 0; i < plane; ++i) sum += std::abs(t.data[c * plane + i]);
  return sum / static_cast<double>((last - first) * plane);
}

}  // namespace

TEST_CASE("ddrf layout and round trip") {
  FeatureTensor t = small_tensor();
  const auto bare = encode_ddrf(t);
  CHECK(bare.size() == 52);
  CHECK(std::memcmp(bare.data(), "DDRF", 4) == 0);
  const FeatureTensor back = decode_ddrf(bare);
  CHECK(back.dims == t.dims);
  CHECK(back.data == t.data);
  CHECK(back.extractor_id.empty());

  t.extractor_id = "resnet-stage2";
  const auto tagged = encode_ddrf(t);
  CHECK(tagged.size() == 52 + 4 + 13);
  CHECK(decode_ddrf(tagged).extractor_id == "resnet-stage2");

  test::TempDir dir("ddrf");
  write_features(t, dir / "x.ddrf");
  const FeatureTensor from_file = ingest_features(dir / "x.ddrf");
  CHECK(from_file.data == t.data);
  CHECK(from_file.extractor_id == t.extractor_id);
  CHECK_THROWS_AS(ingest_features(dir / "missing.ddrf"), FileError);
}

TEST_CASE("ddrf rejects malformed input") {
  const auto good = encode_ddrf(small_tensor());
  auto check_bad = [](std::vector<std::byte> bytes) { CHECK_THROWS_AS(decode_ddrf(bytes), FormatError); };

  auto magic = good;
  magic[0] = std::byte{'X'};
  check_bad(magic);

  auto version = good;
  poke<std::uint32_t>(version, 4, 2);
  check_bad(version);

  auto ndim = good;
  poke<std::uint32_t>(ndim, 8, 0);
  check_bad(ndim);

  auto zero_dim = good;
  poke<std::uint64_t>(zero_dim, 12, 0);
  check_bad(zero_dim);

  check_bad(std::vector<std::byte>(good.begin(), good.end() - 1));
  check_bad(std::vector<std::byte>(good.begin(), good.begin() + 10));

  auto trailing = good;
  trailing.push_back(std::byte{1});
  check_bad(trailing);

  auto nan = good;
  poke<float>(nan, 28, std::nanf(""));
  check_bad(nan);

  auto huge = good;
  poke<std::uint64_t>(huge, 12, std::uint64_t{1} << 62);
  check_bad(huge);

  FeatureTensor invalid = small_tensor();
  invalid.data.pop_back();
  CHECK_THROWS_AS(encode_ddrf(invalid), ValidationError);
}

TEST_CASE("center_and_flatten") {
  const auto s = center_and_flatten(small_tensor());
  REQUIRE(s.count() == 6);
  double sum = 0.0;
  for (double v : s.values) sum += v;
  CHECK(std::abs(sum) < 1e-12);
  const double mean = (1.0 - 2.5 + 3.25 + 0.0 + 1e-3 - 7.0) / 6.0;
  CHECK(s.values[2] == doctest::Approx(3.25 - mean));

  FeatureTensor empty;
  CHECK_THROWS_AS(center_and_flatten(empty), ValidationError);
}

TEST_CASE("concatenate stacks items") {
  FeatureTensor a = small_tensor();
  FeatureTensor b;
  b.dims = {1, 3};
  b.data = {9.0f, 8.0f, 7.0f};
  const std::vector<FeatureTensor> parts = {a, b};
  const auto c = concatenate(parts);
  CHECK(c.dims == std::vector<std::uint64_t>{3, 3});
  CHECK(c.data.back() == 7.0f);
  b.dims = {3, 1};
  const std::vector<FeatureTensor> bad = {a, b};
  CHECK_THROWS_AS(concatenate(bad), ShapeError);
}

TEST_CASE("filter bank") {
  const auto bank = make_filter_bank(0);
  REQUIRE(bank.size() == kFilterBankSize);
  for (const auto& f : bank) {
    double l1 = 0.0;
    for (double v : f.kernel.taps) l1 += std::abs(v);
    CHECK(l1 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(f.kernel.sum()) < 1e-12);
  }
  const auto other = make_filter_bank(1);
  CHECK(other[0].kernel.taps == bank[0].kernel.taps);
  CHECK(other[23].kernel.taps != bank[23].kernel.taps);
  CHECK(builtin_extractor_id(3) != builtin_extractor_id(4));
}

TEST_CASE("builtin extractor") {
  const std::vector<Image> imgs = {noise_image(32, 1), noise_image(32, 2)};
  const auto t = extract_builtin(imgs, 0);
  CHECK(t.dims == std::vector<std::uint64_t>{2, 24, 16, 16});
  CHECK(t.data == extract_builtin(imgs, 0).data);
  CHECK(t.extractor_id == builtin_extractor_id(0));
  t.validate();

  const std::vector<Image> rgb = {Image(10, 12, 3, 0.3)};
  const auto flat = extract_builtin(rgb, 0);
  CHECK(flat.dims == std::vector<std::uint64_t>{1, 72, 5, 6});
  for (float v : flat.data) REQUIRE(std::abs(v) < 1e-6f);

  const std::vector<Image> mixed = {Image(8, 8, 1), Image(8, 9, 1)};
  CHECK_THROWS_AS(extract_builtin(mixed, 0), ShapeError);
}

TEST_CASE("derivative responses drop after blurring") {
  const Image noisy = noise_image(64, 5);
  const auto blur = parse_degradation_spec(std::string_view(R"({"kind":"gaussian_blur","sigma":2})"));
  const std::vector<Image> a = {noisy};
  const std::vector<Image> b = {apply_degradation(noisy, blur, 0)};
  const auto fa = extract_builtin(a, 0);
  const auto fb = extract_builtin(b, 0);
  CHECK(mean_abs_channels(fa, 0, 8) > 2.0 * mean_abs_channels(fb, 0, 8));
}
