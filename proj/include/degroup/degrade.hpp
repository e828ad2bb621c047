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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "degroup/image.hpp"

namespace degroup {

enum class DegradationKind {
  kGaussianBlur,
  kMotionBlur,
  kRichardsonLucy,
  kSuperResolution,
  kRinging,
  kDefocusBlur,
  kJpeg,
  kPoissonNoise,
  kInpainting,
  kGaussianNoise,
  kSaltPepperNoise,
};

std::string_view to_string(DegradationKind kind);
std::optional<DegradationKind> degradation_kind_from_string(std::string_view name);

// Defaults are the centers of the documented parameter ranges.
struct GaussianBlurParams {
  double sigma = 2.0;
};
struct MotionBlurParams {
  double length = 15.0;
  std::optional<double> angle_deg;  ///< unset: drawn uniformly from [0, 180) per image
};
struct RichardsonLucyParams {
  double sigma = 2.0;
  int iterations = 15;
};
struct SuperResolutionParams {
  int factor = 2;
};
struct RingingParams {
  double radius = 0.25;  ///< low-pass radius relative to the Nyquist frequency
};
struct DefocusBlurParams {
  double radius = 4.0;
};
struct JpegParams {
  int quality = 20;
};
struct PoissonNoiseParams {
  double peak = 100.0;  ///< photon count at intensity 1
};
struct InpaintingParams {
  double ratio = 0.2;  ///< masked fraction of the image area
  int block = 16;      ///< square block side in pixels
};
struct GaussianNoiseParams {
  double sigma = 25.0 / 255.0;
};
struct SaltPepperParams {
  double probability = 0.05;
};

using DegradationParams =
    std::variant<GaussianBlurParams, MotionBlurParams, RichardsonLucyParams,
                 SuperResolutionParams, RingingParams, DefocusBlurParams, JpegParams,
                 PoissonNoiseParams, InpaintingParams, GaussianNoiseParams, SaltPepperParams>;

struct DegradationSpec {
  std::string id;
  DegradationParams params;

  DegradationKind kind() const;
  /// True when the operator draws random numbers for this parameterization.
  bool stochastic() const;
};

/// Throws ValidationError on out-of-range parameters or an empty id.
void validate(const DegradationSpec& spec);

/// Parses {"kind": ..., "id": ..., <params>}; missing params take defaults and
/// a missing id defaults to the kind name. Unknown keys are rejected.
DegradationSpec parse_degradation_spec(const nlohmann::json& fragment);
DegradationSpec parse_degradation_spec(std::string_view text);
nlohmann::json to_json(const DegradationSpec& spec);

/// JSON array of specs; ids must be unique.
std::vector<DegradationSpec> parse_suite(const nlohmann::json& array);
std::vector<DegradationSpec> load_suite(const std::filesystem::path& path);

/// Pure function of (image, spec, seed, image_index). Stochastic operators use
/// a counter-based stream keyed by seed and (spec.id, image_index).
Image apply_degradation(const Image& image, const DegradationSpec& spec, std::uint64_t seed,
                        std::uint64_t image_index = 0);

struct ManifestEntry {
  std::string source;
  std::string degradation;
  std::uint64_t seed = 0;
  std::string output;
  std::string checksum;
};

struct CorpusManifest {
  std::vector<ManifestEntry> entries;
  nlohmann::json header;  ///< tool version, JPEG encoder identity, suite echo
};

/// Sorted *.png files of a corpus directory.
std::vector<std::filesystem::path> list_corpus_images(const std::filesystem::path& corpus_dir);

/// Degrades every (image, spec) pair into out_dir/<spec id>/<image stem>.png.
/// `workers` > 1 processes pairs concurrently; the manifest order is fixed.
CorpusManifest degrade_corpus(const std::filesystem::path& corpus_dir,
                              const std::vector<DegradationSpec>& suite, std::uint64_t seed,
                              const std::filesystem::path& out_dir, unsigned workers = 1);

nlohmann::json to_json(const CorpusManifest& manifest);
CorpusManifest manifest_from_json(const nlohmann::json& doc);

// Building blocks, exposed for tests.
Image jpeg_roundtrip(const Image& image, int quality);
std::string jpeg_encoder_identity();
/// Antialiased bicubic (Keys, a = -0.5) resampling with reflect borders.
Plane resize_bicubic(const Plane& plane, std::size_t out_height, std::size_t out_width);
/// Zeroes DFT coefficients outside the circular low-pass of relative radius.
Plane ideal_lowpass(const Plane& plane, double radius);

}  // namespace degroup
