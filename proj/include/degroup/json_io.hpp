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

#include <filesystem>
#include <string_view>

#include "json.hpp"

namespace degroup {

inline constexpr std::string_view kToolName = "degroup";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Parses JSON text, rejecting duplicate object keys with ValidationError and
/// malformed text with FormatError.
nlohmann::json parse_json_strict(std::string_view text);

nlohmann::json read_json_file(const std::filesystem::path& path);
/// Pretty-printed, trailing newline. Parent directories are created.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

/// {"tool": ..., "version": ..., "config": config_echo}
nlohmann::json artifact_header(const nlohmann::json& config_echo = nlohmann::json::object());

}  // namespace degroup
