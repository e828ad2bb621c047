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
#include <string>
#include <vector>

#include "degroup/degrade.hpp"
#include "degroup/grouping.hpp"
#include "degroup/proxy_oracle.hpp"
#include "degroup/selection.hpp"
#include "json.hpp"

namespace degroup {

/// Bundled data directory ($DEGROUP_DATA_DIR overrides the build-time path).
std::filesystem::path data_dir();

enum class ExtractorKind { kBuiltin, kDdrf };
enum class OracleKind { kTable, kProxy };

struct RunConfig {
  bool strict = true;
  std::filesystem::path corpus_dir;
  std::filesystem::path suite_path;  ///< empty when the suite is given inline
  std::vector<DegradationSpec> suite;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  unsigned workers = 1;

  ExtractorKind extractor = ExtractorKind::kBuiltin;
  std::uint64_t bank_seed = 0;
  std::filesystem::path ddrf_dir;

  std::size_t fit_min_samples = kMinFitSamples;
  SearchConfig search;

  OracleKind oracle = OracleKind::kProxy;
  std::filesystem::path oracle_table;
  ProxyConfig proxy;

  double tau = kDefaultTau;
  KlOrder kl_order = KlOrder::kGroupFirst;
  PatchConfig patches;

  std::vector<std::string> warnings;  ///< unknown keys when not strict
};

/// Fills defaults, resolves relative paths against `base_dir`, validates
/// ranges and checks that referenced inputs exist. Throws ConfigError.
RunConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
/// Reads and normalizes a config file.
RunConfig validate_config(const std::filesystem::path& path);
/// All defaults, relative paths resolved against the working directory.
RunConfig default_config();

/// Normalized echo with absolute paths; config_from_json accepts it unchanged.
nlohmann::json to_json(const RunConfig& cfg);

}  // namespace degroup
