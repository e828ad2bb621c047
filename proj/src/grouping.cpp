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

#include "degroup/grouping.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace degroup {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

GroupMask full_mask(std::size_t n) { return n == 32 ? ~GroupMask{0} : (GroupMask{1} << n) - 1; }

}  // namespace

std::vector<std::size_t> mask_members(GroupMask mask) {
  std::vector<std::size_t> out;
  while (mask != 0) {
    out.push_back(static_cast<std::size_t>(std::countr_zero(mask)));
    mask &= mask - 1;
  }
  return out;
}

std::vector<std::string> mask_labels(GroupMask mask, std::span<const std::string> labels) {
  std::vector<std::string> out;
  for (auto i : mask_members(mask)) {
    if (i >= labels.size()) throw ValidationError("group mask refers to an unknown label");
    out.push_back(labels[i]);
  }
  return out;
}

GroupMask labels_mask(std::span<const std::string> group, std::span<const std::string> labels) {
  GroupMask mask = 0;
  for (const auto& g : group) {
    const auto it = std::find(labels.begin(), labels.end(), g);
    if (it == labels.end()) throw ValidationError("unknown degradation '" + g + "'");
    const GroupMask bit = GroupMask{1} << (it - labels.begin());
    if (mask & bit) throw ValidationError("degradation '" + g + "' listed twice in a group");
    mask |= bit;
  }
  return mask;
}

void SearchConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be a finite value > 0");
  if (!(tie_epsilon >= 0.0) || !std::isfinite(tie_epsilon)) throw ConfigError("tie_epsilon must be >= 0");
  if (max_dfs_nodes == 0) throw ConfigError("max_dfs_nodes must be >= 1");
}

nlohmann::json to_json(const SearchConfig& cfg) {
  return {{"delta", cfg.delta},
          {"tie_epsilon", cfg.tie_epsilon},
          {"max_oracle_calls", cfg.max_oracle_calls},
          {"max_dfs_nodes", cfg.max_dfs_nodes},
          {"emit_all_solutions", cfg.emit_all_solutions},
          {"m_search", cfg.m_search == MSearch::kBinary ? "binary" : "linear"}};
}

CandidateLevel enumerate_candidates(const SimilarityMatrix& s, std::size_t L, double tie_epsilon) {
  const std::size_t n = s.size();
  if (n > kMaxSearchSize) throw ValidationError("at most " + std::to_string(kMaxSearchSize) + " degradations");
  if (L < 1 || L > n) throw ValidationError("candidate level L=" + std::to_string(L) + " out of range");
  CandidateLevel level{L, {}};
  if (L == 1) {
    for (std::size_t i = 0; i < n; ++i) level.groups.push_back({GroupMask{1} << i, 0.0, 0.0});
    return level;
  }

  // Rank of each label in alphabetical order, for the final tie-break.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return s.labels()[a] < s.labels()[b]; });
  std::vector<std::uint8_t> rank(n);
  for (std::size_t r = 0; r < n; ++r) rank[order[r]] = static_cast<std::uint8_t>(r);

  struct Entry {
    Candidate c;
    std::vector<std::uint8_t> key;
  };
  std::vector<Entry> entries;
  const GroupMask limit = full_mask(n);
  // Gosper's hack walks the masks with exactly L bits in increasing order.
  for (GroupMask m = (GroupMask{1} << L) - 1; m <= limit && m != 0;) {
    const auto members = mask_members(m);
    const GroupStats st = group_stats(s, members);
    Entry e{{m, st.mean_distance, st.variance}, {}};
    for (auto i : members) e.key.push_back(rank[i]);
    std::sort(e.key.begin(), e.key.end());
    entries.push_back(std::move(e));
    const GroupMask c = m & (~m + 1);
    const GroupMask r = m + c;
    if (r == 0) break;
    m = (((r ^ m) >> 2) / c) | r;
  }

  auto by_variance = [](const Entry& a, const Entry& b) {
    if (a.c.variance != b.c.variance) return a.c.variance < b.c.variance;
    return a.key < b.key;
  };
  std::sort(entries.begin(), entries.end(), [&](const Entry& a, const Entry& b) {
    if (a.c.mean_distance != b.c.mean_distance) return a.c.mean_distance < b.c.mean_distance;
    return by_variance(a, b);
  });
  for (std::size_t i = 0; i < entries.size();) {
    const double anchor = entries[i].c.mean_distance;
    std::size_t j = i + 1;
    while (j < entries.size() &&
           (entries[j].c.mean_distance == anchor || entries[j].c.mean_distance - anchor <= tie_epsilon)) {
      ++j;
    }
    std::sort(entries.begin() + static_cast<std::ptrdiff_t>(i), entries.begin() + static_cast<std::ptrdiff_t>(j),
              by_variance);
    i = j;
  }
  level.groups.reserve(entries.size());
  for (auto& e : entries) level.groups.push_back(e.c);
  return level;
}

DeltaEvaluator::DeltaEvaluator(PerformanceOracle& oracle, std::vector<std::string> labels, std::size_t max_calls)
    : oracle_(oracle), labels_(std::move(labels)), max_calls_(max_calls) {
  if (labels_.size() > 32) throw ValidationError("DeltaEvaluator supports at most 32 labels");
}

double DeltaEvaluator::delta(GroupMask mask) {
  if (mask == 0) throw ValidationError("empty group");
  if (std::has_single_bit(mask)) return 0.0;
  if (const auto it = memo_.find(mask); it != memo_.end()) return it->second;
  if (max_calls_ != 0 && calls_ >= max_calls_) {
    throw BudgetExhausted("oracle call budget of " + std::to_string(max_calls_) + " exhausted");
  }
  ++calls_;
  const auto group = mask_labels(mask, labels_);
  const double d = delta_p(oracle_, group);
  memo_.emplace(mask, d);
  return d;
}

std::optional<double> DeltaEvaluator::known(GroupMask mask) const {
  if (std::has_single_bit(mask)) return 0.0;
  if (const auto it = memo_.find(mask); it != memo_.end()) return it->second;
  return std::nullopt;
}

std::size_t find_lmax(std::span<const CandidateLevel> levels, DeltaEvaluator& eval, const SearchConfig& cfg) {
  if (levels.size() < 2) return 1;
  std::size_t lo = 1;
  std::size_t hi = levels.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    const auto& level = levels[mid];
    if (level.L != mid || level.groups.empty()) throw ValidationError("find_lmax: level list is incomplete");
    if (eval.feasible(level.groups.front().mask, cfg.delta))
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

CandidateLevel prune_level(const CandidateLevel& level, DeltaEvaluator& eval, const SearchConfig& cfg,
                           PruneStats* stats) {
  const std::size_t before = eval.calls();
  // Answer k in [0, count]: ranks < k taken as feasible, the rest not.
  std::size_t lo = 0;
  std::size_t hi = level.groups.size();
  while (lo < hi) {
    const std::size_t mid = (lo + hi + 1) / 2;
    if (eval.feasible(level.groups[mid - 1].mask, cfg.delta))
      lo = mid;
    else
      hi = mid - 1;
  }
  CandidateLevel out{level.L, {level.groups.begin(), level.groups.begin() + static_cast<std::ptrdiff_t>(lo)}};
  if (stats != nullptr) *stats = {level.L, level.groups.size(), lo, eval.calls() - before};
  return out;
}

namespace {

class Solver {
 public:
  Solver(std::size_t n, std::vector<std::vector<GroupMask>> by_element, std::size_t max_size, DeltaEvaluator& eval,
         const SearchConfig& cfg, std::size_t& nodes)
      : n_(n), by_element_(std::move(by_element)), max_size_(max_size), eval_(eval), cfg_(cfg), nodes_(nodes) {}

  /// First feasible scheme with exactly `m` groups in DFS order, or every one
  /// when `collect_all`.
  std::vector<std::vector<GroupMask>> solve(std::size_t m, bool collect_all) {
    m_ = m;
    collect_all_ = collect_all;
    found_.clear();
    chosen_.clear();
    dfs(0);
    return found_;
  }

 private:
  bool dfs(GroupMask covered) {
    if (++nodes_ > cfg_.max_dfs_nodes) throw BudgetExhausted("DFS node budget exhausted");
    const std::size_t c = chosen_.size();
    const auto remaining = n_ - static_cast<std::size_t>(std::popcount(covered));
    if (remaining == 0) {
      if (c != m_) return false;
      for (GroupMask g : chosen_) {
        if (!eval_.feasible(g, cfg_.delta)) return false;
      }
      found_.push_back(chosen_);
      return !collect_all_;
    }
    if (c + (remaining + max_size_ - 1) / max_size_ > m_ || c + remaining < m_) return false;
    const auto e = static_cast<std::size_t>(std::countr_zero(~covered));
    for (GroupMask g : by_element_[e]) {
      if (g & covered) continue;
      if (const auto k = eval_.known(g); k && !(*k <= cfg_.delta)) continue;
      chosen_.push_back(g);
      const bool stop = dfs(covered | g);
      chosen_.pop_back();
      if (stop) return true;
    }
    return false;
  }

  std::size_t n_;
  std::vector<std::vector<GroupMask>> by_element_;
  std::size_t max_size_;
  DeltaEvaluator& eval_;
  const SearchConfig& cfg_;
  std::size_t& nodes_;
  std::size_t m_ = 0;
  bool collect_all_ = false;
  std::vector<GroupMask> chosen_;
  std::vector<std::vector<GroupMask>> found_;
};

PartitionScheme make_scheme(std::vector<GroupMask> groups, DeltaEvaluator& eval) {
  PartitionScheme s;
  s.feasible = true;
  for (GroupMask g : groups) s.delta_p.push_back(*eval.known(g));
  s.groups = std::move(groups);
  return s;
}

PartitionScheme singleton_scheme(std::size_t n) {
  PartitionScheme s;
  for (std::size_t i = 0; i < n; ++i) {
    s.groups.push_back(GroupMask{1} << i);
    s.delta_p.push_back(0.0);
  }
  s.feasible = true;
  return s;
}

}  // namespace

SearchResult grouping_search(const SimilarityMatrix& s, PerformanceOracle& oracle, const SearchConfig& cfg) {
  DeltaEvaluator eval(oracle, s.labels(), cfg.max_oracle_calls);
  return grouping_search(s, eval, cfg);
}

SearchResult grouping_search(const SimilarityMatrix& s, DeltaEvaluator& eval, const SearchConfig& cfg) {
  cfg.validate();
  const std::size_t n = s.size();
  if (n > kMaxSearchSize) throw ValidationError("at most " + std::to_string(kMaxSearchSize) + " degradations");
  if (eval.labels() != s.labels()) throw ValidationError("evaluator labels differ from the similarity matrix");

  SearchResult r;
  r.scheme = singleton_scheme(n);
  const std::size_t calls_before = eval.calls();
  try {
    std::vector<CandidateLevel> levels(n + 1);
    for (std::size_t L = 1; L <= n; ++L) levels[L] = enumerate_candidates(s, L, cfg.tie_epsilon);
    r.lmax = find_lmax(levels, eval, cfg);

    std::vector<std::vector<GroupMask>> by_element(n);
    std::size_t max_size = 1;
    for (std::size_t L = r.lmax; L >= 2; --L) {
      PruneStats st;
      const CandidateLevel kept = prune_level(levels[L], eval, cfg, &st);
      r.pruning.push_back(st);
      if (!kept.groups.empty()) max_size = std::max(max_size, L);
      for (const auto& c : kept.groups)
        for (auto e : mask_members(c.mask)) by_element[e].push_back(c.mask);
    }
    for (std::size_t i = 0; i < n; ++i) by_element[i].push_back(GroupMask{1} << i);

    Solver solver(n, std::move(by_element), max_size, eval, cfg, r.dfs_nodes);
    auto attempt = [&](std::size_t m) {
      ++r.solve_calls;
      auto found = solver.solve(m, false);
      if (found.empty()) return false;
      r.scheme = make_scheme(std::move(found.front()), eval);
      return true;
    };
    std::size_t best = n;
    if (cfg.m_search == MSearch::kBinary) {
      std::size_t lo = 1;
      std::size_t hi = n;
      while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (attempt(mid))
          hi = mid;
        else
          lo = mid + 1;
      }
      best = hi;
    } else {
      for (std::size_t m = 1; m <= n; ++m) {
        if (m == n || attempt(m)) {
          best = m;
          break;
        }
      }
    }
    if (best == n) r.scheme = singleton_scheme(n);
    if (cfg.emit_all_solutions) {
      ++r.solve_calls;
      for (auto& g : solver.solve(best, true)) r.all_minimal.push_back(make_scheme(std::move(g), eval));
    }
  } catch (const BudgetExhausted& e) {
    r.complete = false;
    r.incomplete_reason = e.what();
  }
  r.oracle_calls = eval.calls() - calls_before;
  return r;
}

BruteForceResult brute_force_min_partition(DeltaEvaluator& eval, std::size_t n, double delta) {
  if (n > kMaxBruteForceSize) {
    throw ValidationError("brute force is limited to n <= " + std::to_string(kMaxBruteForceSize));
  }
  if (n == 0) throw ValidationError("brute force needs n >= 1");
  if (eval.labels().size() != n) throw ValidationError("evaluator label count differs from n");
  BruteForceResult out;
  out.m = n + 1;
  const std::size_t before = eval.calls();
  std::vector<GroupMask> groups;
  // Restricted growth strings: element i joins an existing block or opens the next one.
  auto assign = [&](auto&& self, std::size_t i) -> void {
    if (i == n) {
      ++out.partitions;
      for (GroupMask g : groups) {
        if (!eval.feasible(g, delta)) return;
      }
      if (groups.size() < out.m) {
        out.m = groups.size();
        out.schemes.clear();
      }
      if (groups.size() == out.m) out.schemes.push_back(make_scheme(groups, eval));
      return;
    }
    const GroupMask bit = GroupMask{1} << i;
    for (std::size_t b = 0; b < groups.size(); ++b) {
      groups[b] |= bit;
      self(self, i + 1);
      groups[b] &= ~bit;
    }
    groups.push_back(bit);
    self(self, i + 1);
    groups.pop_back();
  };
  assign(assign, 0);
  out.oracle_calls = eval.calls() - before;
  return out;
}

PartitionScheme verify_scheme(std::span<const GroupMask> groups, std::size_t n, PerformanceOracle& oracle,
                              std::span<const std::string> labels, double delta) {
  PartitionScheme s;
  s.groups.assign(groups.begin(), groups.end());
  GroupMask covered = 0;
  bool exact = true;
  for (GroupMask g : groups) {
    if (g == 0 || (g & covered)) exact = false;
    covered |= g;
  }
  if (covered != full_mask(n)) exact = false;
  s.feasible = exact;
  for (GroupMask g : groups) {
    if (g == 0) {
      s.delta_p.push_back(kInf);
      continue;
    }
    const auto members = mask_labels(g, labels);
    const double d = delta_p(oracle, members);
    s.delta_p.push_back(d);
    if (!(d <= delta)) s.feasible = false;
  }
  return s;
}

nlohmann::json to_json(const PartitionScheme& scheme, std::span<const std::string> labels) {
  nlohmann::json groups = nlohmann::json::array();
  for (std::size_t i = 0; i < scheme.groups.size(); ++i) {
    groups.push_back({{"members", mask_labels(scheme.groups[i], labels)},
                      {"delta_p", i < scheme.delta_p.size() ? finite_or_null(scheme.delta_p[i]) : nullptr}});
  }
  return {{"m", scheme.m()}, {"groups", groups}, {"feasible", scheme.feasible}};
}

nlohmann::json search_report(const SearchResult& r, std::span<const std::string> labels, const SearchConfig& cfg) {
  nlohmann::json pruning = nlohmann::json::array();
  for (const auto& p : r.pruning) {
    pruning.push_back({{"L", p.L}, {"candidates", p.candidates}, {"kept", p.kept}, {"oracle_calls", p.probes}});
  }
  nlohmann::json all = nlohmann::json::array();
  for (const auto& s : r.all_minimal) all.push_back(to_json(s, labels));
  return {{"labels", labels},
          {"scheme", to_json(r.scheme, labels)},
          {"all_minimal", all},
          {"lmax", r.lmax},
          {"pruning", pruning},
          {"oracle_calls", r.oracle_calls},
          {"dfs_nodes", r.dfs_nodes},
          {"solve_calls", r.solve_calls},
          {"complete", r.complete},
          {"incomplete_reason", r.incomplete_reason},
          {"search_config", to_json(cfg)}};
}

PartitionScheme scheme_from_json(const nlohmann::json& j, std::span<const std::string> labels) {
  if (!j.is_object() || !j.contains("groups") || !j["groups"].is_array()) {
    throw FormatError("partition scheme needs a 'groups' array");
  }
  PartitionScheme s;
  for (const auto& g : j["groups"]) {
    if (!g.is_object() || !g.contains("members")) throw FormatError("scheme group needs 'members'");
    const auto members = g["members"].get<std::vector<std::string>>();
    s.groups.push_back(labels_mask(members, labels));
    const auto& d = g.value("delta_p", nlohmann::json());
    s.delta_p.push_back(d.is_number() ? d.get<double>() : kInf);
  }
  s.feasible = j.value("feasible", false);
  return s;
}

}  // namespace degroup
