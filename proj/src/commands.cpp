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

#include "degroup/commands.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <memory>
#include <numbers>
#include <optional>

#include "CLI11.hpp"
#include "degroup/error.hpp"
#include "degroup/features.hpp"
#include "degroup/filter.hpp"
#include "degroup/ggd.hpp"
#include "degroup/grouping.hpp"
#include "degroup/json_io.hpp"
#include "degroup/oracle.hpp"
#include "degroup/parallel.hpp"
#include "degroup/proxy_oracle.hpp"
#include "degroup/rng.hpp"
#include "degroup/selection.hpp"
#include "degroup/similarity.hpp"

namespace degroup {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json header_for(const RunConfig& cfg) { return artifact_header(to_json(cfg)); }

void write_artifact(const RunConfig& cfg, const fs::path& path, const json& doc) {
  write_json_file(cfg.output_dir / "config.json", to_json(cfg));
  write_json_file(path, doc);
}

json require_artifact(const RunConfig& cfg, const char* file, const char* producer) {
  const fs::path path = cfg.output_dir / file;
  if (!fs::is_regular_file(path)) {
    throw DataError("missing " + path.string() + "; run 'degroup " + producer + "' first");
  }
  return read_json_file(path);
}

json suite_echo(const std::vector<DegradationSpec>& suite) {
  json out = json::array();
  for (const auto& s : suite) out.push_back(to_json(s));
  return out;
}

std::vector<std::string> suite_ids(const RunConfig& cfg) {
  std::vector<std::string> ids;
  for (const auto& s : cfg.suite) ids.push_back(s.id);
  return ids;
}

std::vector<fs::path> ddrf_files(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw DataError("no DDRF directory " + dir.string());
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ddrf") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw DataError("no .ddrf files in " + dir.string());
  return files;
}

struct FitRecord {
  std::string id;
  GgdFit fit;
};

std::vector<FitRecord> fits_from_artifact(const json& doc) {
  if (!doc.contains("fits") || !doc["fits"].is_array()) throw FormatError("fits artifact needs a 'fits' array");
  std::vector<FitRecord> out;
  for (const auto& f : doc["fits"]) {
    out.push_back({f.at("id").get<std::string>(),
                   GgdFit{ggd_from_json(f), f.value("clamped", false), f.value("count", std::size_t{0})}});
  }
  return out;
}

}  // namespace

json stage_degrade(const RunConfig& cfg) {
  CorpusManifest manifest =
      degrade_corpus(cfg.corpus_dir, cfg.suite, cfg.seed, cfg.output_dir / "degraded", cfg.workers);
  manifest.header["config"] = to_json(cfg);
  json doc = to_json(manifest);
  write_artifact(cfg, cfg.output_dir / kManifestFile, doc);
  return doc;
}

json stage_fit(const RunConfig& cfg) {
  const std::vector<std::string> ids = suite_ids(cfg);
  std::vector<std::optional<GgdFit>> fits(ids.size());
  std::string extractor_id;

  if (cfg.extractor == ExtractorKind::kBuiltin) {
    const CorpusManifest manifest = manifest_from_json(require_artifact(cfg, kManifestFile, "degrade"));
    if (manifest.header.value("suite", json()) != suite_echo(cfg.suite)) {
      throw DataError("manifest was produced for a different suite; rerun 'degroup degrade'");
    }
    extractor_id = builtin_extractor_id(cfg.bank_seed);
    parallel_for(ids.size(), cfg.workers, [&](std::size_t k) {
      std::vector<Image> images;
      for (const auto& e : manifest.entries) {
        if (e.degradation == ids[k]) images.push_back(load_image(e.output));
      }
      if (images.empty()) throw DataError("manifest has no images for '" + ids[k] + "'");
      const FeatureTensor t = extract_builtin(images, cfg.bank_seed);
      fits[k] = fit_ggd(center_and_flatten(t).values, cfg.fit_min_samples);
    });
  } else {
    std::vector<std::string> extractor_ids(ids.size());
    parallel_for(ids.size(), cfg.workers, [&](std::size_t k) {
      std::vector<FeatureTensor> parts;
      for (const auto& f : ddrf_files(cfg.ddrf_dir / ids[k])) parts.push_back(ingest_features(f));
      for (const auto& p : parts) {
        if (p.extractor_id != parts.front().extractor_id) {
          throw DataError("DDRF files for '" + ids[k] + "' disagree on the extractor id");
        }
      }
      extractor_ids[k] = parts.front().extractor_id;
      fits[k] = fit_ggd(center_and_flatten(concatenate(parts)).values, cfg.fit_min_samples);
    });
    for (const auto& e : extractor_ids) {
      if (e != extractor_ids.front()) throw DataError("DDRF directories use different extractors");
    }
    extractor_id = extractor_ids.front();
  }

  json list = json::array();
  for (std::size_t k = 0; k < ids.size(); ++k) {
    const GgdFit& f = *fits[k];
    json j = ggd_to_json(f.params);
    j["id"] = ids[k];
    j["clamped"] = f.clamped;
    j["count"] = f.count;
    list.push_back(j);
  }
  json doc = {{"header", header_for(cfg)}, {"extractor_id", extractor_id}, {"fits", list}};
  write_artifact(cfg, cfg.output_dir / kFitsFile, doc);
  return doc;
}

json stage_similarity(const RunConfig& cfg) {
  const json fits_doc = require_artifact(cfg, kFitsFile, "fit");
  std::vector<LabeledFit> fits;
  for (const auto& r : fits_from_artifact(fits_doc)) fits.push_back({r.id, r.fit.params});
  const SimilarityMatrix s = build_similarity_matrix(fits);
  json doc = to_json(s);
  doc["header"] = header_for(cfg);
  doc["extractor_id"] = fits_doc.value("extractor_id", "");
  write_artifact(cfg, cfg.output_dir / kSimilarityFile, doc);
  return doc;
}

json stage_group(const RunConfig& cfg) {
  const SimilarityMatrix s = similarity_from_json(require_artifact(cfg, kSimilarityFile, "similarity"));
  std::unique_ptr<PerformanceOracle> inner;
  json oracle_info;
  if (cfg.oracle == OracleKind::kTable) {
    inner = std::make_unique<TableOracle>(load_oracle_table(cfg.oracle_table));
    oracle_info = {{"kind", "table"}, {"path", cfg.oracle_table.string()}};
  } else {
    const CorpusManifest manifest = manifest_from_json(require_artifact(cfg, kManifestFile, "degrade"));
    inner = std::make_unique<ProxyOracle>(manifest, cfg.proxy);
    oracle_info = {{"kind", "proxy"}};
  }
  const fs::path cache_file = default_cache_file();
  CachedOracle oracle(*inner, cache_file);

  const SearchResult r = grouping_search(s, oracle, cfg.search);
  const auto& labels = s.labels();
  json doc = search_report(r, labels, cfg.search);
  if (r.complete) {
    const PartitionScheme check = verify_scheme(r.scheme.groups, labels.size(), oracle, labels, cfg.search.delta);
    doc["verified"] = check.feasible;
  } else {
    doc["verified"] = false;
  }
  oracle_info["config_hash"] = oracle.config_hash();
  oracle_info["evaluations"] = oracle.inner_calls();
  oracle_info["cache_hits"] = oracle.hits();
  oracle_info["cache_file"] = cache_file.string();
  oracle_info["warnings"] = oracle.warnings();
  doc["oracle"] = oracle_info;
  doc["header"] = header_for(cfg);
  const fs::path path = cfg.output_dir / kGroupingFile;
  write_artifact(cfg, path, doc);
  if (!r.complete) {
    throw BudgetError("grouping search incomplete (" + r.incomplete_reason + "); best scheme so far written to " +
                      path.string());
  }
  return doc;
}

json stage_profile(const RunConfig& cfg) {
  const json grouping = require_artifact(cfg, kGroupingFile, "group");
  const json fits_doc = require_artifact(cfg, kFitsFile, "fit");
  const auto labels = grouping.at("labels").get<std::vector<std::string>>();
  const PartitionScheme scheme = scheme_from_json(grouping.at("scheme"), labels);
  std::map<std::string, GgdParams> by_id;
  for (const auto& r : fits_from_artifact(fits_doc)) by_id.emplace(r.id, r.fit.params);

  json profiles = json::array();
  for (std::size_t g = 0; g < scheme.groups.size(); ++g) {
    std::vector<std::string> members = mask_labels(scheme.groups[g], labels);
    std::vector<GgdParams> member_fits;
    for (const auto& m : members) {
      auto it = by_id.find(m);
      if (it == by_id.end()) throw DataError("fits artifact has no fit for '" + m + "'; rerun 'degroup fit'");
      member_fits.push_back(it->second);
    }
    profiles.push_back(to_json(make_profile("C" + std::to_string(g + 1), std::move(members), std::move(member_fits))));
  }
  json doc = {{"header", header_for(cfg)},
              {"extractor_id", fits_doc.value("extractor_id", "")},
              {"scheme_feasible", scheme.feasible},
              {"profiles", profiles}};
  write_artifact(cfg, cfg.output_dir / kProfilesFile, doc);
  return doc;
}

json stage_select(const RunConfig& cfg, const SelectInput& input, const fs::path& out_path) {
  const json doc_in = require_artifact(cfg, kProfilesFile, "profile");
  std::vector<GroupProfile> profiles;
  for (const auto& p : doc_in.at("profiles")) profiles.push_back(profile_from_json(p));
  const std::string profile_extractor = doc_in.value("extractor_id", "");

  if (input.image.empty() == input.features.empty()) throw ConfigError("select needs exactly one of --image or --features");
  std::optional<GgdFit> fit;
  json input_info;
  if (!input.image.empty()) {
    if (cfg.extractor != ExtractorKind::kBuiltin) throw ConfigError("--image requires the builtin extractor");
    const std::string id = builtin_extractor_id(cfg.bank_seed);
    if (id != profile_extractor) {
      throw DataError("profiles were built with extractor '" + profile_extractor + "' but the config selects '" + id +
                      "'");
    }
    fit = estimate_input_ggd(load_image(input.image), cfg.bank_seed, cfg.patches);
    input_info = {{"image", input.image.string()}};
  } else {
    const FeatureTensor t = ingest_features(input.features);
    if (!t.extractor_id.empty() && t.extractor_id != profile_extractor) {
      throw DataError("features come from extractor '" + t.extractor_id + "' but profiles use '" + profile_extractor +
                      "'");
    }
    fit = estimate_input_ggd(t);
    input_info = {{"features", input.features.string()}};
  }
  input_info["ggd"] = ggd_to_json(fit->params);
  input_info["clamped"] = fit->clamped;
  input_info["count"] = fit->count;

  const SelectionResult r = select_model(fit->params, profiles, cfg.tau, cfg.kl_order);
  json doc = to_json(r);
  doc["input"] = input_info;
  doc["extractor_id"] = profile_extractor;
  doc["header"] = header_for(cfg);
  write_artifact(cfg, out_path.empty() ? cfg.output_dir / kSelectionFile : out_path, doc);
  return doc;
}

json stage_predict(const RunConfig& cfg, const fs::path& selection_path, std::optional<double> tau) {
  json sel_doc;
  if (selection_path.empty()) {
    sel_doc = require_artifact(cfg, kSelectionFile, "select");
  } else {
    if (!fs::is_regular_file(selection_path)) {
      throw DataError("missing " + selection_path.string() + "; run 'degroup select' first");
    }
    sel_doc = read_json_file(selection_path);
  }
  const SelectionResult r = selection_from_json(sel_doc);
  const double t = tau.value_or(cfg.tau);
  if (!(t >= 0.0) || !std::isfinite(t)) throw ConfigError("tau must be a finite value >= 0");
  json doc = {{"header", header_for(cfg)},
              {"chosen_group_id", r.chosen_group_id},
              {"divergence", r.divergence},
              {"tau", t},
              {"verdict", to_string(predict_generalization(r, t))}};
  write_artifact(cfg, cfg.output_dir / kPredictionFile, doc);
  return doc;
}

json replay_table1(const fs::path& table_path, double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) throw ConfigError("delta must be a finite value > 0");
  const OracleTable table = load_oracle_table(table_path);
  TableOracle oracle(table);
  if (!table.extra.contains("published_groups")) throw FormatError("table has no 'published_groups'");
  std::vector<PublishedGroup> groups;
  for (const auto& g : table.extra["published_groups"]) {
    groups.push_back({g.at("name").get<std::string>(), g.at("members").get<std::vector<std::string>>()});
  }
  const auto reports = replay_groups(oracle, groups, delta);
  json list = json::array();
  bool all_feasible = true;
  for (const auto& r : reports) {
    list.push_back({{"name", r.name}, {"members", r.members}, {"delta_p", r.delta_p}, {"feasible", r.feasible}});
    all_feasible = all_feasible && r.feasible;
  }
  json doc = {{"header", artifact_header()},
              {"table", table_path.string()},
              {"delta", delta},
              {"groups", list},
              {"all_feasible", all_feasible},
              {"mean_gain_vs_single_task", mean_gain(oracle, groups, table.single_task)}};
  if (table.extra.contains("baseline_group")) {
    const auto members = table.extra["baseline_group"].get<std::vector<std::string>>();
    const auto it = table.mix_groups.find(group_key(members));
    if (it == table.mix_groups.end()) throw CoverageError("baseline group has no row in mix_groups");
    doc["mean_gain_vs_baseline"] = mean_gain(oracle, groups, it->second);
  }
  return doc;
}

std::vector<Image> smoke_corpus_images(std::size_t size, std::uint64_t seed) {
  if (size < 64) throw ConfigError("smoke corpus size must be >= 64");
  const std::size_t n = size;
  const double last = static_cast<double>(n - 1);
  auto noise = [&](std::size_t idx) {
    CounterRng rng(seed, stream_id("smoke_corpus", idx));
    Plane p(n, n);
    for (auto& v : p.data) v = rng.normal();
    return p;
  };
  auto blur = [](const Plane& p, double sigma) {
    const auto taps = kernels::gaussian_1d(sigma);
    return correlate_separable(p, taps, taps);
  };
  auto stretch = [](Plane p, double lo, double hi) {
    const auto [mn, mx] = std::minmax_element(p.data.begin(), p.data.end());
    const double a = *mn;
    const double range = std::max(*mx - a, 1e-12);
    for (auto& v : p.data) v = lo + (hi - lo) * (v - a) / range;
    return p;
  };
  auto field = [&](auto fn) {
    Plane p(n, n);
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t x = 0; x < n; ++x) p.at(y, x) = fn(static_cast<double>(y), static_cast<double>(x));
    return p;
  };

  std::vector<Plane> planes;
  planes.push_back(field([&](double y, double x) { return 0.1 + 0.8 * (x + y) / (2.0 * last); }));
  planes.push_back(field([&](double y, double x) {
    const double c = last / 2.0;
    return 0.9 - 0.8 * std::min(1.0, std::hypot(y - c, x - c) / (c * std::numbers::sqrt2));
  }));
  planes.push_back(field([](double y, double x) {
    return (static_cast<long>(y / 32) + static_cast<long>(x / 32)) % 2 == 0 ? 0.2 : 0.8;
  }));
  planes.push_back(field([](double y, double x) {
    const double a = std::numbers::pi / 6.0;
    const double u = x * std::cos(a) + y * std::sin(a);
    const double v = -x * std::sin(a) + y * std::cos(a) + 1024.0;
    return (static_cast<long>(std::floor(u / 8)) + static_cast<long>(std::floor(v / 8))) % 2 == 0 ? 0.25 : 0.75;
  }));
  planes.push_back(stretch(blur(noise(4), 4.0), 0.1, 0.9));
  {
    const Plane base = noise(5);
    Plane band = blur(base, 1.5);
    const Plane wide = blur(base, 4.0);
    for (std::size_t i = 0; i < band.data.size(); ++i) band.data[i] -= wide.data[i];
    planes.push_back(stretch(band, 0.15, 0.85));
  }
  planes.push_back(field([](double y, double x) {
    const double a = std::numbers::pi / 9.0;
    return 0.5 + 0.35 * std::sin(2.0 * std::numbers::pi * (x * std::cos(a) + y * std::sin(a)) / 10.0);
  }));
  {
    const Plane tex = stretch(blur(noise(7), 1.0), 0.0, 1.0);
    planes.push_back(field([&](double y, double x) { return 0.1 + 0.6 * x / last + 0.25 * tex.at(y, x); }));
  }

  std::vector<Image> images;
  for (const auto& p : planes) images.push_back(Image::from_planes(std::span(&p, 1)));
  return images;
}

std::vector<fs::path> make_smoke_corpus(const fs::path& out_dir, std::size_t size, std::uint64_t seed) {
  const auto images = smoke_corpus_images(size, seed);
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw FileError("cannot create " + out_dir.string() + ": " + ec.message());
  std::vector<fs::path> paths;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string digits = std::to_string(i);
    paths.push_back(out_dir / ("smoke_" + std::string(2 - std::min<std::size_t>(2, digits.size()), '0') + digits + ".png"));
    save_image(images[i], paths.back());
  }
  return paths;
}

namespace {

struct CommonFlags {
  std::string config;
  CLI::Option* config_opt = nullptr;
  std::string output_dir;
  CLI::Option* output_opt = nullptr;
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  unsigned workers = 1;
  CLI::Option* workers_opt = nullptr;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  f.config_opt = sub->add_option("--config", f.config, "JSON run config");
  f.output_opt = sub->add_option("--output-dir", f.output_dir, "Artifact directory (overrides the config)");
  f.seed_opt = sub->add_option("--seed", f.seed, "Global seed (overrides the config)");
  f.workers_opt = sub->add_option("--workers", f.workers, "Worker threads (overrides the config)");
}

RunConfig load_config(const CommonFlags& f, std::ostream& err) {
  json doc = json::object();
  fs::path base = fs::current_path();
  if (f.config_opt->count() > 0) {
    const fs::path path(f.config);
    if (!fs::is_regular_file(path)) throw ConfigError("config file does not exist: " + path.string());
    try {
      doc = read_json_file(path);
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
    base = fs::absolute(path).parent_path();
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  }
  if (f.output_opt->count() > 0) doc["output_dir"] = fs::absolute(f.output_dir).string();
  if (f.seed_opt->count() > 0) doc["seed"] = f.seed;
  if (f.workers_opt->count() > 0) doc["workers"] = f.workers;
  RunConfig cfg = config_from_json(doc, base);
  for (const auto& w : cfg.warnings) err << json{{"warning", w}}.dump() << "\n";
  return cfg;
}

json artifact_summary(const char* stage, const fs::path& path) {
  return {{"stage", stage}, {"artifact", path.string()}};
}

}  // namespace

int run_command(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Degradation grouping and model selection toolkit", std::string(kToolName)};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::deque<CommonFlags> flags;
  std::vector<CLI::App*> stage_cmds;
  auto add_stage = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags.emplace_back());
    stage_cmds.push_back(sub);
    return sub;
  };
  CLI::App* degrade = add_stage("degrade", "Degrade the corpus with every suite entry and write the manifest");
  CLI::App* fit = add_stage("fit", "Fit one GGD per degradation from its features");
  CLI::App* similarity = add_stage("similarity", "Pairwise symmetric log-KL matrix of the fits");
  CLI::App* group = add_stage("group", "Minimal-cardinality grouping search against the configured oracle");
  CLI::App* profile = add_stage("profile", "Per-group averaged GGD profiles");
  CLI::App* pipeline = add_stage("pipeline", "degrade, fit, similarity, group and profile in sequence");

  SelectInput select_input;
  std::string select_out;
  std::string image_arg;
  std::string features_arg;
  CLI::Option* tau_opt_select = nullptr;
  double tau_select = kDefaultTau;
  CLI::App* select = add_stage("select", "Choose the group whose profile is nearest to an input");
  select->add_option("--image", image_arg, "PNG input (builtin extractor)");
  select->add_option("--features", features_arg, "DDRF input");
  select->add_option("--out", select_out, "Report path (default <output-dir>/selection.json)");
  tau_opt_select = select->add_option("--tau", tau_select, "In-distribution threshold");

  std::string selection_arg;
  double tau_predict = kDefaultTau;
  CLI::App* predict = add_stage("predict", "In/out-of-distribution verdict for a selection report");
  predict->add_option("--selection", selection_arg, "Selection report (default <output-dir>/selection.json)");
  CLI::Option* tau_opt_predict = predict->add_option("--tau", tau_predict, "In-distribution threshold");

  std::string table_arg = (data_dir() / "oracle" / "table1_restormer.json").string();
  double replay_delta = 0.7;
  std::string replay_out;
  CLI::App* replay = app.add_subcommand("replay-table1", "Delta P of the published groups from a bundled oracle table");
  replay->add_option("--table", table_arg, "Oracle table JSON")->capture_default_str();
  replay->add_option("--delta", replay_delta, "Feasibility threshold in dB")->capture_default_str();
  replay->add_option("--out", replay_out, "Also write the report here");

  std::string gap_arg = (data_dir() / "oracle" / "tab3_similarity_gap.json").string();
  std::string gap_out;
  CLI::App* gap = app.add_subcommand("replay-similarity-gap", "Mean gains of higher vs lower similarity groups");
  gap->add_option("--data", gap_arg, "Experiment JSON")->capture_default_str();
  gap->add_option("--out", gap_out, "Also write the report here");

  std::string validate_arg;
  CLI::App* validate_cmd = app.add_subcommand("validate-config", "Print the normalized config");
  validate_cmd->add_option("config", validate_arg, "Config file")->required();

  std::string smoke_out;
  std::size_t smoke_size = 256;
  std::uint64_t smoke_seed = 0;
  CLI::App* smoke = app.add_subcommand("make-smoke-corpus", "Write the synthetic smoke corpus");
  smoke->add_option("--out", smoke_out, "Output directory")->required();
  smoke->add_option("--size", smoke_size, "Image side in pixels")->capture_default_str();
  smoke->add_option("--seed", smoke_seed, "Noise seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << json{{"error", {{"kind", "usage"}, {"message", e.what()}}}}.dump() << "\n";
    return 2;
  }

  const CommonFlags* common = nullptr;
  for (std::size_t i = 0; i < stage_cmds.size(); ++i) {
    if (stage_cmds[i]->parsed()) common = &flags[i];
  }

  try {
    json summary;
    if (degrade->parsed()) {
      const RunConfig cfg = load_config(*common, err);
      const json doc = stage_degrade(cfg);
      summary = artifact_summary("degrade", cfg.output_dir / kManifestFile);
      summary["images"] = doc["entries"].size();
    } else if (fit->parsed()) {
      const RunConfig cfg = load_config(*common, err);
      const json doc = stage_fit(cfg);
      summary = artifact_summary("fit", cfg.output_dir / kFitsFile);
      summary["fits"] = doc["fits"];
    } else if (similarity->parsed()) {
      const RunConfig cfg = load_config(*common, err);
      const json doc = stage_similarity(cfg);
      summary = artifact_summary("similarity", cfg.output_dir / kSimilarityFile);
      summary["labels"] = doc["labels"];
    } else if (group->parsed()) {
      const RunConfig cfg = load_config(*common, err);
      const json doc = stage_group(cfg);
      summary = artifact_summary("group", cfg.output_dir / kGroupingFile);
      summary["scheme"] = doc["scheme"];
      summary["oracle_calls"] = doc["oracle_calls"];
    } else if (profile->parsed()) {
      const RunConfig cfg = load_config(*common, err);
      stage_profile(cfg);
      summary = artifact_summary("profile", cfg.output_dir / kProfilesFile);
    } else if (pipeline->parsed()) {
      const RunConfig cfg = load_config(*common, err);
      stage_degrade(cfg);
      stage_fit(cfg);
      stage_similarity(cfg);
      const json grouping = stage_group(cfg);
      stage_profile(cfg);
      summary = artifact_summary("pipeline", cfg.output_dir / kProfilesFile);
      summary["scheme"] = grouping["scheme"];
    } else if (select->parsed()) {
      RunConfig cfg = load_config(*common, err);
      if (tau_opt_select->count() > 0) cfg.tau = tau_select;
      if (!(cfg.tau >= 0.0) || !std::isfinite(cfg.tau)) throw ConfigError("tau must be a finite value >= 0");
      select_input.image = image_arg;
      select_input.features = features_arg;
      const fs::path out_path = select_out.empty() ? fs::path() : fs::absolute(select_out);
      const json doc = stage_select(cfg, select_input, out_path);
      summary = artifact_summary("select", out_path.empty() ? cfg.output_dir / kSelectionFile : out_path);
      summary["chosen_group_id"] = doc["chosen_group_id"];
      summary["divergence"] = doc["divergence"];
      summary["verdict"] = doc["verdict"];
    } else if (predict->parsed()) {
      const RunConfig cfg = load_config(*common, err);
      const auto tau = tau_opt_predict->count() > 0 ? std::optional<double>(tau_predict) : std::nullopt;
      summary = stage_predict(cfg, selection_arg, tau);
      summary.erase("header");
    } else if (replay->parsed()) {
      summary = replay_table1(table_arg, replay_delta);
      if (!replay_out.empty()) write_json_file(replay_out, summary);
    } else if (gap->parsed()) {
      json list = json::array();
      for (const auto& r : replay_similarity_gap(read_json_file(gap_arg))) list.push_back(to_json(r));
      summary = {{"header", artifact_header()}, {"data", gap_arg}, {"experiments", list}};
      if (!gap_out.empty()) write_json_file(gap_out, summary);
    } else if (validate_cmd->parsed()) {
      summary = to_json(validate_config(validate_arg));
    } else if (smoke->parsed()) {
      json files = json::array();
      for (const auto& p : make_smoke_corpus(smoke_out, smoke_size, smoke_seed)) files.push_back(p.string());
      summary = {{"files", files}};
    }
    out << summary.dump(2) << "\n";
    return 0;
  } catch (const Error& e) {
    err << json{{"error", {{"kind", std::string(to_string(e.kind()))}, {"message", e.what()}}}}.dump() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << json{{"error", {{"kind", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 3;
  }
}

}  // namespace degroup
