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
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "degroup/filter.hpp"
#include "degroup/image.hpp"

namespace degroup {

/// Degradation representation: (items, channels, height, width) or
/// (items, length) float32 values plus provenance.
struct FeatureTensor {
  std::vector<std::uint64_t> dims;
  std::vector<float> data;
  std::string extractor_id;  ///< stored as DDRF metadata
  std::string source;        ///< where the tensor came from (not serialized)

  std::uint64_t expected_size() const;
  /// Throws ValidationError: empty or zero dims, size mismatch, non-finite values.
  void validate() const;
};

struct SampleVector {
  std::vector<double> values;
  std::size_t count() const noexcept { return values.size(); }
};

enum class FilterFamily { kDerivative, kGabor, kLaplacian, kRandom };

struct BankFilter {
  FilterFamily family;
  Kernel2d kernel;
};

inline constexpr std::size_t kFilterBankSize = 24;

/// 8 oriented derivative-of-Gaussian, 8 Gabor (two scales x four orientations),
/// 4 Laplacian-of-Gaussian and 4 balanced random +-1 filters drawn from
/// `bank_seed`. All but the random ones are zero-mean; all have unit L1 norm.
std::vector<BankFilter> make_filter_bank(std::uint64_t bank_seed);

/// Built-in extractor: filter bank, |.|, 2x2 average pooling, per image channel.
/// Output dims: (items, image_channels * 24, height / 2, width / 2).
FeatureTensor extract_builtin(std::span<const Image> images, std::uint64_t bank_seed);

std::string builtin_extractor_id(std::uint64_t bank_seed);

/// Stacks tensors along the item axis; trailing dims must agree.
FeatureTensor concatenate(std::span<const FeatureTensor> tensors);

// DDRF interchange: "DDRF", u32 version (1), u32 ndim, u64 dims[ndim],
// f32 payload, then optionally u32 length + UTF-8 extractor id. Little-endian.
inline constexpr std::uint32_t kDdrfVersion = 1;

std::vector<std::byte> encode_ddrf(const FeatureTensor& tensor);
FeatureTensor decode_ddrf(std::span<const std::byte> bytes);
void write_features(const FeatureTensor& tensor, const std::filesystem::path& path);
FeatureTensor ingest_features(const std::filesystem::path& path);

/// Flattens all values and subtracts their global mean.
SampleVector center_and_flatten(const FeatureTensor& tensor);

}  // namespace degroup
