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
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "degroup/error.hpp"
#include "degroup/oracle.hpp"
#include "degroup/similarity.hpp"
#include "json.hpp"

namespace degroup {

/// Bit i set means the i-th label of the similarity matrix is a member.
using GroupMask = std::uint32_t;

inline constexpr std::size_t kMaxSearchSize = 20;
inline constexpr std::size_t kMaxBruteForceSize = 12;

std::vector<std::size_t> mask_members(GroupMask mask);
std::vector<std::string> mask_labels(GroupMask mask, std::span<const std::string> labels);
GroupMask labels_mask(std::span<const std::string> group, std::span<const std::string> labels);

enum class MSearch {
  kBinary,  ///< binary search on m; assumes feasibility is monotone in m
  kLinear,  ///< m = 1, 2, ... until Solve succeeds
};

struct SearchConfig {
  double delta = 0.7;
  double tie_epsilon = 0.05;
  std::size_t max_oracle_calls = 0;  ///< 0 means unlimited
  std::size_t max_dfs_nodes = 100'000'000;
  bool emit_all_solutions = false;
  MSearch m_search = MSearch::kBinary;

  void validate() const;  ///< throws ConfigError
};

nlohmann::json to_json(const SearchConfig& cfg);

struct Candidate {
  GroupMask mask;
  double mean_distance;
  double variance;
};

struct CandidateLevel {
  std::size_t L = 0;
  std::vector<Candidate> groups;  ///< ranked
};

/// All C(n, L) groups ranked by mean distance ascending. Walking the sorted
/// list, each cluster collects the entries whose mean lies within tie_epsilon
/// of the cluster's first mean and is re-ordered by variance, then by member
/// labels. L = 1 gives the singletons in label order.
CandidateLevel enumerate_candidates(const SimilarityMatrix& s, std::size_t L, double tie_epsilon);

/// Memoized Delta P over masks. Singletons are 0 without an oracle call.
class DeltaEvaluator {
 public:
  DeltaEvaluator(PerformanceOracle& oracle, std::vector<std::string> labels, std::size_t max_calls = 0);

  double delta(GroupMask mask);
  bool feasible(GroupMask mask, double threshold) { return delta(mask) <= threshold; }
  std::optional<double> known(GroupMask mask) const;

  /// Distinct non-singleton groups sent to the oracle.
  std::size_t calls() const noexcept { return calls_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

 private:
  PerformanceOracle& oracle_;
  std::vector<std::string> labels_;
  std::size_t max_calls_;
  std::size_t calls_ = 0;
  std::unordered_map<GroupMask, double> memo_;
};

/// Raised when the evaluator's call budget or the DFS node budget runs out.
class BudgetExhausted : public BudgetError {
 public:
  using BudgetError::BudgetError;
};

/// Largest L whose top-ranked group verifies, by binary search with 1 as the
/// always-feasible floor. `levels[L]` holds level L for L = 2..n.
std::size_t find_lmax(std::span<const CandidateLevel> levels, DeltaEvaluator& eval, const SearchConfig& cfg);

struct PruneStats {
  std::size_t L = 0;
  std::size_t candidates = 0;
  std::size_t kept = 0;
  std::size_t probes = 0;
};

/// Keeps the ranked prefix up to the last verified position found by binary
/// search over ranks (at most ceil(log2(count)) + 1 probes).
CandidateLevel prune_level(const CandidateLevel& level, DeltaEvaluator& eval, const SearchConfig& cfg,
                           PruneStats* stats = nullptr);

struct PartitionScheme {
  std::vector<GroupMask> groups;
  std::vector<double> delta_p;
  bool feasible = false;

  std::size_t m() const noexcept { return groups.size(); }
};

struct SearchResult {
  PartitionScheme scheme;
  std::vector<PartitionScheme> all_minimal;  ///< filled when emit_all_solutions
  std::size_t lmax = 1;
  std::vector<PruneStats> pruning;
  std::size_t oracle_calls = 0;
  std::size_t dfs_nodes = 0;
  std::size_t solve_calls = 0;
  bool complete = true;
  std::string incomplete_reason;
};

/// Full search: candidate levels, L_max, pruning, then Solve for m by binary
/// (or linear) search. Singletons always complete the candidate lists. On
/// budget exhaustion returns the best feasible scheme found so far, or the
/// singleton partition, with complete = false.
SearchResult grouping_search(const SimilarityMatrix& s, PerformanceOracle& oracle, const SearchConfig& cfg);

/// Same search with a caller-owned evaluator (shares its memo and counters).
SearchResult grouping_search(const SimilarityMatrix& s, DeltaEvaluator& eval, const SearchConfig& cfg);

struct BruteForceResult {
  std::size_t m = 0;
  std::vector<PartitionScheme> schemes;  ///< every feasible partition with m groups
  std::size_t oracle_calls = 0;          ///< distinct non-singleton groups evaluated
  std::size_t partitions = 0;
};

/// Enumerates all set partitions as restricted growth strings. n <= 12.
BruteForceResult brute_force_min_partition(DeltaEvaluator& eval, std::size_t n, double delta);

/// Recomputes every group's Delta P through the oracle and checks exact cover.
PartitionScheme verify_scheme(std::span<const GroupMask> groups, std::size_t n, PerformanceOracle& oracle,
                              std::span<const std::string> labels, double delta);

nlohmann::json to_json(const PartitionScheme& scheme, std::span<const std::string> labels);
nlohmann::json search_report(const SearchResult& r, std::span<const std::string> labels, const SearchConfig& cfg);
PartitionScheme scheme_from_json(const nlohmann::json& j, std::span<const std::string> labels);

}  // namespace degroup
