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

#include "degroup/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "degroup/error.hpp"
#include "degroup/hash.hpp"
#include "degroup/json_io.hpp"

namespace degroup {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double psnr_from_json(const nlohmann::json& v, const std::string& where) {
  if (v.is_null()) return kNegInf;
  if (!v.is_number()) throw FormatError(where + ": PSNR must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw FormatError(where + ": PSNR must be finite");
  return d;
}

PsnrMap psnr_map_from_json(const nlohmann::json& obj, const std::string& where) {
  if (!obj.is_object()) throw FormatError(where + " must be an object");
  PsnrMap out;
  for (const auto& [id, v] : obj.items()) out[id] = psnr_from_json(v, where + "." + id);
  return out;
}

nlohmann::json psnr_map_to_json(const PsnrMap& m) {
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [id, v] : m) {
    if (std::isfinite(v))
      out[id] = v;
    else
      out[id] = nullptr;
  }
  return out;
}

}  // namespace

std::string group_key(std::span<const std::string> members) {
  if (members.empty()) throw ValidationError("group has no members");
  std::vector<std::string> sorted(members.begin(), members.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("group lists a member twice");
  }
  std::string key;
  for (const auto& m : sorted) {
    if (m.empty() || m.find('+') != std::string::npos) throw ValidationError("malformed group member '" + m + "'");
    if (!key.empty()) key += '+';
    key += m;
  }
  return key;
}

std::vector<std::string> parse_group_key(std::string_view key) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = key.find('+', start);
    const auto part = key.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    if (part.empty()) throw ValidationError("malformed group key '" + std::string(key) + "'");
    parts.emplace_back(part);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  std::vector<std::string> sorted = parts;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("group key '" + std::string(key) + "' repeats a member");
  }
  return parts;
}

double delta_p(PerformanceOracle& oracle, std::span<const std::string> group) {
  if (group.empty()) throw ValidationError("delta_p of an empty group");
  const PsnrMap mix = oracle.evaluate(group);
  double worst = kNegInf;
  for (const auto& id : group) {
    const auto it = mix.find(id);
    if (it == mix.end()) throw CoverageError("oracle has no result for '" + id + "' in group " + group_key(group));
    const double drop = oracle.upper_bound(id) - it->second;
    worst = std::max(worst, drop);
  }
  return worst;
}

OracleTable oracle_table_from_json(const nlohmann::json& doc) {
  if (!doc.is_object()) throw FormatError("oracle table must be a JSON object");
  if (!doc.contains("single_task")) throw FormatError("oracle table lacks 'single_task'");
  OracleTable t;
  for (const auto& [key, value] : doc.items()) {
    if (key == "single_task") {
      t.single_task = psnr_map_from_json(value, "single_task");
      for (const auto& [id, v] : t.single_task) {
        if (!std::isfinite(v)) throw FormatError("single_task." + id + " must be a number");
      }
    } else if (key == "mix_groups") {
      if (!value.is_object()) throw FormatError("mix_groups must be an object");
    } else if (key == "uncovered_groups") {
      const auto policy = value.is_string() ? value.get<std::string>() : std::string();
      if (policy == "error")
        t.uncovered = UncoveredPolicy::kError;
      else if (policy == "infeasible")
        t.uncovered = UncoveredPolicy::kInfeasible;
      else
        throw ValidationError("uncovered_groups must be \"error\" or \"infeasible\"");
    } else {
      t.extra[key] = value;
    }
  }
  if (doc.contains("mix_groups")) {
    for (const auto& [raw_key, value] : doc["mix_groups"].items()) {
      const auto members = parse_group_key(raw_key);
      const std::string key = group_key(members);
      if (t.mix_groups.contains(key)) throw ValidationError("duplicate group key '" + key + "'");
      PsnrMap entry = psnr_map_from_json(value, "mix_groups." + raw_key);
      for (const auto& m : members) {
        if (!t.single_task.contains(m)) {
          throw CoverageError("group '" + key + "' references '" + m + "' which has no single-task value");
        }
        if (!entry.contains(m)) throw CoverageError("group '" + key + "' has no PSNR for member '" + m + "'");
      }
      if (entry.size() != members.size()) {
        throw ValidationError("group '" + key + "' lists PSNRs for non-members");
      }
      t.mix_groups.emplace(key, std::move(entry));
    }
  }
  return t;
}

OracleTable load_oracle_table(const std::filesystem::path& path) {
  try {
    return oracle_table_from_json(read_json_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

nlohmann::json to_json(const OracleTable& table) {
  nlohmann::json mix = nlohmann::json::object();
  for (const auto& [key, m] : table.mix_groups) mix[key] = psnr_map_to_json(m);
  nlohmann::json out = table.extra.is_object() ? table.extra : nlohmann::json::object();
  out["single_task"] = table.single_task;
  out["mix_groups"] = mix;
  out["uncovered_groups"] = table.uncovered == UncoveredPolicy::kError ? "error" : "infeasible";
  return out;
}

TableOracle::TableOracle(OracleTable table) : table_(std::move(table)) {
  nlohmann::json identity = to_json(table_);
  identity.erase("source");
  identity.erase("notes");
  hash_ = "table-" + to_hex(fnv1a64(identity.dump()));
}

PsnrMap TableOracle::evaluate(std::span<const std::string> group) {
  const std::string key = group_key(group);
  for (const auto& id : group) {
    if (!table_.single_task.contains(id)) throw CoverageError("degradation '" + id + "' is not in the oracle table");
  }
  if (const auto it = table_.mix_groups.find(key); it != table_.mix_groups.end()) return it->second;
  if (group.size() == 1) return {{group[0], table_.single_task.at(group[0])}};
  if (table_.uncovered == UncoveredPolicy::kInfeasible) {
    PsnrMap out;
    for (const auto& id : group) out[id] = kNegInf;
    return out;
  }
  throw CoverageError("oracle table has no entry for group " + key);
}

double TableOracle::upper_bound(const std::string& id) {
  const auto it = table_.single_task.find(id);
  if (it == table_.single_task.end()) throw CoverageError("degradation '" + id + "' is not in the oracle table");
  return it->second;
}

std::vector<std::string> TableOracle::degradations() const {
  std::vector<std::string> out;
  for (const auto& [id, v] : table_.single_task) out.push_back(id);
  return out;
}

std::filesystem::path default_cache_file() {
  const char* dir = std::getenv("DEGROUP_CACHE_DIR");
  if (dir == nullptr || *dir == '\0') return {};
  return std::filesystem::path(dir) / "oracle_cache.json";
}

CachedOracle::CachedOracle(PerformanceOracle& inner, std::filesystem::path cache_file)
    : inner_(inner), cache_file_(std::move(cache_file)) {
  if (cache_file_.empty() || !std::filesystem::exists(cache_file_)) return;
  try {
    nlohmann::json doc = read_json_file(cache_file_);
    if (!doc.is_object() || doc.value("format", "") != "degroup-oracle-cache" || !doc.contains("entries") ||
        !doc["entries"].is_object()) {
      throw FormatError("unrecognized cache layout");
    }
    for (const auto& [hash, groups] : doc["entries"].items()) {
      if (!groups.is_object()) throw FormatError("cache entry for " + hash + " is not an object");
      for (const auto& [key, m] : groups.items()) psnr_map_from_json(m, key);
    }
    store_ = std::move(doc["entries"]);
  } catch (const Error& e) {
    warnings_.push_back("oracle cache " + cache_file_.string() + " is corrupt (" + e.what() + "); rebuilding");
    store_ = nlohmann::json::object();
  }
}

void CachedOracle::persist_locked() {
  if (cache_file_.empty()) return;
  const nlohmann::json doc = {{"format", "degroup-oracle-cache"}, {"version", 1}, {"entries", store_}};
  auto tmp = cache_file_;
  tmp += ".tmp";
  write_json_file(tmp, doc);
  std::filesystem::rename(tmp, cache_file_);
}

PsnrMap CachedOracle::evaluate(std::span<const std::string> group) {
  const std::string key = group_key(group);
  const std::string hash = inner_.config_hash();
  {
    std::lock_guard lock(mutex_);
    if (store_.contains(hash) && store_[hash].contains(key)) {
      ++hits_;
      return psnr_map_from_json(store_[hash][key], key);
    }
  }
  PsnrMap result = inner_.evaluate(group);
  std::lock_guard lock(mutex_);
  ++inner_calls_;
  store_[hash][key] = psnr_map_to_json(result);
  persist_locked();
  return result;
}

double CachedOracle::upper_bound(const std::string& id) { return inner_.upper_bound(id); }

std::size_t CachedOracle::inner_calls() const {
  std::lock_guard lock(mutex_);
  return inner_calls_;
}

std::size_t CachedOracle::hits() const {
  std::lock_guard lock(mutex_);
  return hits_;
}

std::vector<GroupDeltaReport> replay_groups(PerformanceOracle& oracle, std::span<const PublishedGroup> groups,
                                            double delta) {
  std::vector<GroupDeltaReport> out;
  for (const auto& g : groups) {
    const double d = delta_p(oracle, g.members);
    out.push_back({g.name, g.members, d, d <= delta});
  }
  return out;
}

double mean_gain(PerformanceOracle& oracle, std::span<const PublishedGroup> groups, const PsnrMap& reference) {
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& g : groups) {
    const PsnrMap mix = oracle.evaluate(g.members);
    for (const auto& id : g.members) {
      const auto ref = reference.find(id);
      if (ref == reference.end()) throw CoverageError("no reference PSNR for '" + id + "'");
      sum += mix.at(id) - ref->second;
      ++count;
    }
  }
  if (count == 0) throw ValidationError("mean_gain over no tasks");
  return sum / static_cast<double>(count);
}

namespace {

GapGroupResult gap_group(const nlohmann::json& g, const PsnrMap& upper, const std::string& where) {
  if (!g.is_object() || !g.contains("distance") || !g.contains("mix")) {
    throw FormatError(where + " needs 'distance' and 'mix'");
  }
  GapGroupResult r{g["distance"].get<double>(), {}, {}, 0.0};
  // Members keep their published column order, so "mix" is an array of pairs.
  for (const auto& entry : g["mix"]) {
    if (!entry.is_array() || entry.size() != 2) throw FormatError(where + ".mix entries are [id, dB] pairs");
    const auto id = entry[0].get<std::string>();
    const auto it = upper.find(id);
    if (it == upper.end()) throw CoverageError(where + ": no single-task value for '" + id + "'");
    r.members.push_back(id);
    r.gains.push_back(entry[1].get<double>() - it->second);
  }
  if (r.members.empty()) throw FormatError(where + " has no members");
  double s = 0.0;
  for (double v : r.gains) s += v;
  r.mean_gain = s / static_cast<double>(r.gains.size());
  return r;
}

}  // namespace

std::vector<GapExperimentResult> replay_similarity_gap(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("single_task") || !doc.contains("experiments")) {
    throw FormatError("similarity-gap file needs 'single_task' and 'experiments'");
  }
  const PsnrMap upper = psnr_map_from_json(doc["single_task"], "single_task");
  std::vector<GapExperimentResult> out;
  for (const auto& e : doc["experiments"]) {
    GapExperimentResult r;
    r.name = e.at("name").get<std::string>();
    r.features = e.value("features", "DDR");
    r.higher = gap_group(e.at("higher"), upper, r.name + ".higher");
    r.lower = gap_group(e.at("lower"), upper, r.name + ".lower");
    r.consistent = r.higher.mean_gain >= r.lower.mean_gain;
    r.published = e.value("published", nlohmann::json::object());
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json to_json(const GapExperimentResult& r) {
  auto group = [](const GapGroupResult& g) {
    return nlohmann::json{{"distance", g.distance}, {"members", g.members}, {"gains", g.gains},
                          {"mean_gain", g.mean_gain}};
  };
  return {{"name", r.name},           {"features", r.features},     {"higher", group(r.higher)},
          {"lower", group(r.lower)}, {"consistent", r.consistent}, {"published", r.published}};
}

}  // namespace degroup
