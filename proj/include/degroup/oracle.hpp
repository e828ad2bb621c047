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
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace degroup {

using PsnrMap = std::map<std::string, double>;

/// Sorted member ids joined with '+'. Throws ValidationError for empty or
/// repeated members.
std::string group_key(std::span<const std::string> members);
std::vector<std::string> parse_group_key(std::string_view key);

/// P(M, d): mix-training and single-task PSNRs for degradation groups.
class PerformanceOracle {
 public:
  virtual ~PerformanceOracle() = default;

  /// PSNR of the model trained on `group`, for every member. -infinity marks a
  /// group known to be infeasible.
  virtual PsnrMap evaluate(std::span<const std::string> group) = 0;
  /// Single-task PSNR for `id`.
  virtual double upper_bound(const std::string& id) = 0;
  /// Identifies the configuration; evaluate is deterministic per hash.
  virtual std::string config_hash() const = 0;
  /// Relative cost of evaluating `group`; never decreases when members are added.
  virtual double cost(std::span<const std::string> group) const {
    return static_cast<double>(group.size());
  }
};

/// max over members of upper_bound(d) - evaluate(group)[d]. Member order does
/// not matter. Throws CoverageError if a member is missing from the evaluation.
double delta_p(PerformanceOracle& oracle, std::span<const std::string> group);

enum class UncoveredPolicy {
  kError,       ///< unknown groups raise CoverageError
  kInfeasible,  ///< unknown groups evaluate to -infinity
};

struct OracleTable {
  PsnrMap single_task;
  std::map<std::string, PsnrMap> mix_groups;  ///< canonical key -> member PSNRs
  UncoveredPolicy uncovered = UncoveredPolicy::kError;
  nlohmann::json extra;  ///< unrecognized informational keys ("source", "notes")
};

/// Schema: {"single_task": {id: dB}, "mix_groups": {"a+b": {id: dB}},
/// optional "uncovered_groups": "error" | "infeasible"}.
OracleTable oracle_table_from_json(const nlohmann::json& doc);
OracleTable load_oracle_table(const std::filesystem::path& path);
nlohmann::json to_json(const OracleTable& table);

/// Replays a published table. Singletons absent from mix_groups evaluate to
/// their single-task value.
class TableOracle final : public PerformanceOracle {
 public:
  explicit TableOracle(OracleTable table);

  PsnrMap evaluate(std::span<const std::string> group) override;
  double upper_bound(const std::string& id) override;
  std::string config_hash() const override { return hash_; }

  const OracleTable& table() const noexcept { return table_; }
  std::vector<std::string> degradations() const;

 private:
  OracleTable table_;
  std::string hash_;
};

/// Memoizes evaluate by (config hash, group key), optionally persisted to a
/// JSON file. Thread-safe.
class CachedOracle final : public PerformanceOracle {
 public:
  explicit CachedOracle(PerformanceOracle& inner, std::filesystem::path cache_file = {});

  PsnrMap evaluate(std::span<const std::string> group) override;
  double upper_bound(const std::string& id) override;
  std::string config_hash() const override { return inner_.config_hash(); }
  double cost(std::span<const std::string> group) const override { return inner_.cost(group); }

  /// Calls forwarded to the wrapped oracle's evaluate.
  std::size_t inner_calls() const;
  std::size_t hits() const;
  const std::vector<std::string>& warnings() const noexcept { return warnings_; }

 private:
  void persist_locked();

  PerformanceOracle& inner_;
  std::filesystem::path cache_file_;
  mutable std::mutex mutex_;
  nlohmann::json store_ = nlohmann::json::object();  ///< {config_hash: {group_key: {id: dB}}}
  std::size_t inner_calls_ = 0;
  std::size_t hits_ = 0;
  std::vector<std::string> warnings_;
};

/// Cache location: $DEGROUP_CACHE_DIR/oracle_cache.json, or empty when unset.
std::filesystem::path default_cache_file();

struct PublishedGroup {
  std::string name;
  std::vector<std::string> members;
};

struct GroupDeltaReport {
  std::string name;
  std::vector<std::string> members;
  double delta_p;
  bool feasible;
};

/// Per-group Delta P against threshold `delta`.
std::vector<GroupDeltaReport> replay_groups(PerformanceOracle& oracle, std::span<const PublishedGroup> groups,
                                            double delta);

/// Mean over tasks of (mix - reference) where each task's mix PSNR comes from
/// the group containing it.
double mean_gain(PerformanceOracle& oracle, std::span<const PublishedGroup> groups, const PsnrMap& reference);

/// Similarity-gap experiments: each pairs a higher- and a lower-similarity group
/// of mix-training results against shared single-task values.
struct GapGroupResult {
  double distance;
  std::vector<std::string> members;
  std::vector<double> gains;  ///< mix - upper per member
  double mean_gain;
};

struct GapExperimentResult {
  std::string name;
  std::string features;
  GapGroupResult higher;
  GapGroupResult lower;
  /// Higher-similarity group keeps at least the lower group's mean gain.
  bool consistent;
  nlohmann::json published;  ///< transcribed reference values, echoed unchanged
};

std::vector<GapExperimentResult> replay_similarity_gap(const nlohmann::json& doc);
nlohmann::json to_json(const GapExperimentResult& r);

}  // namespace degroup
