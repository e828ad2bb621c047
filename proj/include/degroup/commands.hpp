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
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "degroup/config.hpp"
#include "degroup/image.hpp"
#include "json.hpp"

namespace degroup {

/// Runs one command line (without the program name). Artifacts go to the
/// configured output directory, a JSON summary to `out`, and failures to `err`
/// as {"error": {"kind", "message"}}. Returns 0, or 2 config, 3 data, 4 budget.
int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err);

// Artifact file names inside the output directory.
inline constexpr const char* kManifestFile = "manifest.json";
inline constexpr const char* kFitsFile = "fits.json";
inline constexpr const char* kSimilarityFile = "similarity.json";
inline constexpr const char* kGroupingFile = "grouping.json";
inline constexpr const char* kProfilesFile = "profiles.json";
inline constexpr const char* kSelectionFile = "selection.json";
inline constexpr const char* kPredictionFile = "prediction.json";

// Pipeline stages. Each reads its upstream artifacts from cfg.output_dir,
// writes its own, and returns the artifact document.
nlohmann::json stage_degrade(const RunConfig& cfg);
nlohmann::json stage_fit(const RunConfig& cfg);
nlohmann::json stage_similarity(const RunConfig& cfg);
/// Throws BudgetError after writing a partial report when the search is incomplete.
nlohmann::json stage_group(const RunConfig& cfg);
nlohmann::json stage_profile(const RunConfig& cfg);

struct SelectInput {
  std::filesystem::path image;     ///< PNG to featurize with the built-in extractor
  std::filesystem::path features;  ///< or a DDRF file
};
nlohmann::json stage_select(const RunConfig& cfg, const SelectInput& input,
                            const std::filesystem::path& out_path = {});
nlohmann::json stage_predict(const RunConfig& cfg, const std::filesystem::path& selection_path = {},
                             std::optional<double> tau = std::nullopt);

/// Delta P of the table's published groups plus the mean gains over the
/// single-task and all-task baseline rows.
nlohmann::json replay_table1(const std::filesystem::path& table_path, double delta);

/// The bundled synthetic corpus: gradients, checkerboards and filtered noise.
std::vector<Image> smoke_corpus_images(std::size_t size = 256, std::uint64_t seed = 0);
/// Writes smoke_XX.png files and returns their paths.
std::vector<std::filesystem::path> make_smoke_corpus(const std::filesystem::path& out_dir, std::size_t size = 256,
                                                     std::uint64_t seed = 0);

}  // namespace degroup
