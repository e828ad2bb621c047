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

#include "degroup/config.hpp"

#include <cmath>
#include <cstdlib>
#include <exception>
#include <set>

#include "degroup/error.hpp"
#include "degroup/json_io.hpp"

namespace degroup {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path data_dir() {
  if (const char* env = std::getenv("DEGROUP_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return DEGROUP_DATA_DIR;
}

namespace {

/// Reads typed fields of one config object and reports leftovers.
class Section {
 public:
  Section(const json& obj, std::string name, RunConfig& cfg) : obj_(obj), name_(std::move(name)), cfg_(cfg) {
    if (!obj_.is_object()) throw ConfigError(label() + " must be an object");
  }

  ~Section() noexcept(false) {
    if (std::uncaught_exceptions() > 0) return;
    for (const auto& [key, v] : obj_.items()) {
      if (used_.contains(key)) continue;
      const std::string msg = "unknown config key '" + qualified(key) + "'";
      if (cfg_.strict) throw ConfigError(msg);
      cfg_.warnings.push_back(msg);
    }
  }

  bool has(const std::string& key) {
    used_.insert(key);
    return obj_.contains(key);
  }

  template <typename T>
  T get(const std::string& key, T fallback) {
    if (!has(key)) return fallback;
    const json& v = obj_[key];
    try {
      if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("");
      } else if constexpr (std::is_integral_v<T>) {
        if (!v.is_number_integer() || (std::is_unsigned_v<T> && v.get<std::int64_t>() < 0)) throw ConfigError("");
      } else if constexpr (std::is_floating_point_v<T>) {
        if (!v.is_number()) throw ConfigError("");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("");
      }
      return v.get<T>();
    } catch (const std::exception&) {
      throw ConfigError("config key '" + qualified(key) + "' has the wrong type");
    }
  }

  const json& raw(const std::string& key) {
    used_.insert(key);
    return obj_.at(key);
  }

  std::string qualified(const std::string& key) const { return name_.empty() ? key : name_ + "." + key; }

 private:
  std::string label() const { return name_.empty() ? "config" : "config section '" + name_ + "'"; }

  const json& obj_;
  std::string name_;
  RunConfig& cfg_;
  std::set<std::string> used_;
};

fs::path resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  const fs::path path(p);
  return fs::weakly_canonical(path.is_absolute() ? path : base / path);
}

void require_dir(const fs::path& p, const std::string& what) {
  if (!fs::is_directory(p)) throw ConfigError(what + " is not a directory: " + p.string());
}

void require_file(const fs::path& p, const std::string& what) {
  if (!fs::is_regular_file(p)) throw ConfigError(what + " does not exist: " + p.string());
}

}  // namespace

RunConfig config_from_json(const json& doc, const fs::path& base_dir) {
  RunConfig cfg;
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  const fs::path base = fs::absolute(base_dir);
  {
    Section top(doc, "", cfg);
    cfg.strict = top.get("strict", true);
    cfg.seed = top.get<std::uint64_t>("seed", 0);
    cfg.workers = top.get<unsigned>("workers", 1);
    if (cfg.workers < 1 || cfg.workers > 256) throw ConfigError("workers must be in [1, 256]");

    cfg.corpus_dir = top.has("corpus_dir") ? resolve(base, top.get<std::string>("corpus_dir", ""))
                                           : data_dir() / "smoke_corpus";
    require_dir(cfg.corpus_dir, "corpus_dir");
    cfg.output_dir = resolve(base, top.get<std::string>("output_dir", "degroup_out"));

    try {
      if (top.has("suite") && top.raw("suite").is_array()) {
        cfg.suite = parse_suite(top.raw("suite"));
      } else {
        cfg.suite_path = top.has("suite") ? resolve(base, top.get<std::string>("suite", ""))
                                          : data_dir() / "suites" / "smoke4.json";
        require_file(cfg.suite_path, "suite");
        cfg.suite = load_suite(cfg.suite_path);
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(std::string("suite: ") + e.what());
    }
    if (cfg.suite.empty()) throw ConfigError("suite is empty");

    cfg.bank_seed = cfg.seed;
    if (top.has("extractor")) {
      Section ex(top.raw("extractor"), "extractor", cfg);
      const auto kind = ex.get<std::string>("kind", "builtin");
      if (kind == "builtin") {
        cfg.extractor = ExtractorKind::kBuiltin;
        cfg.bank_seed = ex.get<std::uint64_t>("bank_seed", cfg.seed);
      } else if (kind == "ddrf") {
        cfg.extractor = ExtractorKind::kDdrf;
        if (!ex.has("dir")) throw ConfigError("extractor.dir is required for kind \"ddrf\"");
        cfg.ddrf_dir = resolve(base, ex.get<std::string>("dir", ""));
        require_dir(cfg.ddrf_dir, "extractor.dir");
      } else {
        throw ConfigError("extractor.kind must be \"builtin\" or \"ddrf\"");
      }
    }

    if (top.has("fit")) {
      Section fit(top.raw("fit"), "fit", cfg);
      cfg.fit_min_samples = fit.get<std::size_t>("min_samples", kMinFitSamples);
      if (cfg.fit_min_samples < 2) throw ConfigError("fit.min_samples must be >= 2");
    }

    if (top.has("grouping")) {
      Section g(top.raw("grouping"), "grouping", cfg);
      cfg.search.delta = g.get("delta", cfg.search.delta);
      cfg.search.tie_epsilon = g.get("tie_epsilon", cfg.search.tie_epsilon);
      cfg.search.max_oracle_calls = g.get("max_oracle_calls", cfg.search.max_oracle_calls);
      cfg.search.max_dfs_nodes = g.get("max_dfs_nodes", cfg.search.max_dfs_nodes);
      cfg.search.emit_all_solutions = g.get("emit_all_solutions", cfg.search.emit_all_solutions);
      const auto mode = g.get<std::string>("m_search", "binary");
      if (mode == "binary")
        cfg.search.m_search = MSearch::kBinary;
      else if (mode == "linear")
        cfg.search.m_search = MSearch::kLinear;
      else
        throw ConfigError("grouping.m_search must be \"binary\" or \"linear\"");
    }
    cfg.search.validate();

    cfg.proxy.seed = cfg.seed;
    if (top.has("oracle")) {
      const json& o = top.raw("oracle");
      if (!o.is_object()) throw ConfigError("config section 'oracle' must be an object");
      const auto kind = o.value("kind", std::string("proxy"));
      if (kind == "table") {
        Section t(o, "oracle", cfg);
        t.has("kind");
        cfg.oracle = OracleKind::kTable;
        if (!t.has("path")) throw ConfigError("oracle.path is required for kind \"table\"");
        cfg.oracle_table = resolve(base, t.get<std::string>("path", ""));
        require_file(cfg.oracle_table, "oracle.path");
      } else if (kind == "proxy") {
        cfg.oracle = OracleKind::kProxy;
        json proxy = o;
        proxy.erase("kind");
        if (proxy.contains("seed")) throw ConfigError("oracle.seed is not configurable; the global seed is used");
        cfg.proxy = proxy_config_from_json(proxy);
        cfg.proxy.seed = cfg.seed;
      } else {
        throw ConfigError("oracle.kind must be \"table\" or \"proxy\"");
      }
    }

    if (top.has("selection")) {
      Section s(top.raw("selection"), "selection", cfg);
      cfg.tau = s.get("tau", cfg.tau);
      if (!(cfg.tau >= 0.0) || !std::isfinite(cfg.tau)) throw ConfigError("selection.tau must be >= 0");
      cfg.kl_order = kl_order_from_string(s.get<std::string>("kl_order", "group_first"));
      cfg.patches.patch = s.get("patch", cfg.patches.patch);
      cfg.patches.stride = s.get("stride", cfg.patches.stride);
      cfg.patches.min_patches = s.get("min_patches", cfg.patches.min_patches);
      if (cfg.patches.patch < 8 || cfg.patches.stride < 1 || cfg.patches.min_patches < 1) {
        throw ConfigError("selection.patch must be >= 8, stride and min_patches >= 1");
      }
    }
  }
  return cfg;
}

RunConfig validate_config(const fs::path& path) {
  json doc;
  try {
    doc = read_json_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return config_from_json(doc, fs::absolute(path).parent_path());
}

RunConfig default_config() { return config_from_json(json::object(), fs::current_path()); }

json to_json(const RunConfig& cfg) {
  json suite = json::array();
  for (const auto& s : cfg.suite) suite.push_back(to_json(s));
  json extractor = cfg.extractor == ExtractorKind::kBuiltin
                       ? json{{"kind", "builtin"}, {"bank_seed", cfg.bank_seed}}
                       : json{{"kind", "ddrf"}, {"dir", cfg.ddrf_dir.string()}};
  json search = to_json(cfg.search);
  json oracle;
  if (cfg.oracle == OracleKind::kTable) {
    oracle = {{"kind", "table"}, {"path", cfg.oracle_table.string()}};
  } else {
    oracle = to_json(cfg.proxy);
    oracle.erase("seed");
    oracle["kind"] = "proxy";
  }
  return {{"strict", cfg.strict},
          {"corpus_dir", cfg.corpus_dir.string()},
          {"suite", suite},
          {"output_dir", cfg.output_dir.string()},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"extractor", extractor},
          {"fit", {{"min_samples", cfg.fit_min_samples}}},
          {"grouping", search},
          {"oracle", oracle},
          {"selection",
           {{"tau", cfg.tau},
            {"kl_order", to_string(cfg.kl_order)},
            {"patch", cfg.patches.patch},
            {"stride", cfg.patches.stride},
            {"min_patches", cfg.patches.min_patches}}}};
}

}  // namespace degroup
