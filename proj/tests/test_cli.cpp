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

#include <fstream>
#include <sstream>

#include "degroup/commands.hpp"
#include "degroup/config.hpp"
#include "degroup/json_io.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace degroup;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run_command(args, out, err);
  return {code, out.str(), err.str()};
}

/// Output dir holding a hand-made similarity artifact for labels a, b, c and a
/// config pointing the table oracle at `table`.
std::filesystem::path table_setup(const test::TempDir& dir, const json& table, std::size_t max_calls = 0) {
  const std::vector<std::string> labels = {"a", "b", "c"};
  const double inf = -std::numeric_limits<double>::infinity();
  const auto s = test::matrix_from(labels, {inf, 1.0, 2.0, 1.0, inf, 3.0, 2.0, 3.0, inf});
  write_json_file(dir / "out" / "similarity.json", to_json(s));
  write_json_file(dir / "table.json", table);
  write_json_file(dir / "cfg.json", {{"output_dir", "out"},
                                     {"oracle", {{"kind", "table"}, {"path", "table.json"}}},
                                     {"grouping", {{"max_oracle_calls", max_calls}}}});
  return dir / "cfg.json";
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  const auto bad = run({"frobnicate"});
  CHECK(bad.code == 2);
  CHECK(json::parse(bad.err).at("error").at("kind") == "usage");
  CHECK(run({"select", "--tau"}).code == 2);
  CHECK(run({"--version"}).code == 0);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config errors exit with 2") {
  test::TempDir dir("cli_cfg");
  write_json_file(dir / "bad.json", {{"grouping", {{"delta", -1}}}});
  const auto r = run({"validate-config", (dir / "bad.json").string()});
  CHECK(r.code == 2);
  CHECK(json::parse(r.err).at("error").at("kind") == "config");
  CHECK(run({"fit", "--config", (dir / "nope.json").string()}).code == 2);

  write_json_file(dir / "ok.json", {{"seed", 5}});
  const auto ok = run({"validate-config", (dir / "ok.json").string()});
  CHECK(ok.code == 0);
  CHECK(json::parse(ok.out).at("seed") == 5);
}

TEST_CASE("missing upstream artifacts name their producer") {
  test::TempDir dir("cli_missing");
  const std::string out = (dir / "o").string();
  const std::pair<const char*, const char*> cases[] = {
      {"fit", "degroup degrade"}, {"similarity", "degroup fit"}, {"profile", "degroup group"}};
  for (auto [stage, producer] : cases) {
    const auto r = run({stage, "--output-dir", out});
    CAPTURE(stage);
    CHECK(r.code == 3);
    CHECK(r.err.find(producer) != std::string::npos);
  }
  CHECK(run({"predict", "--output-dir", out}).code == 3);
}

TEST_CASE("table oracle grouping through the cli") {
  test::TempDir dir("cli_group");
  SUBCASE("singleton-only table gives m = n") {
    const json table = {{"single_task", {{"a", 30.0}, {"b", 31.0}, {"c", 32.0}}},
                        {"mix_groups", json::object()},
                        {"uncovered_groups", "infeasible"}};
    const auto cfg = table_setup(dir, table);
    const auto r = run({"group", "--config", cfg.string()});
    REQUIRE(r.code == 0);
    const auto doc = read_json_file(dir / "out" / "grouping.json");
    CHECK(doc.at("scheme").at("m") == 3);
    CHECK(doc.at("complete") == true);
    CHECK(doc.at("verified") == true);
    CHECK(doc.at("oracle").at("kind") == "table");
    CHECK(json::parse(r.out).at("scheme").at("m") == 3);
  }
  SUBCASE("a feasible pair is merged") {
    const json table = {{"single_task", {{"a", 30.0}, {"b", 31.0}, {"c", 32.0}}},
                        {"mix_groups", {{"a+b", {{"a", 29.9}, {"b", 30.8}}}}},
                        {"uncovered_groups", "infeasible"}};
    const auto cfg = table_setup(dir, table);
    REQUIRE(run({"group", "--config", cfg.string()}).code == 0);
    CHECK(read_json_file(dir / "out" / "grouping.json").at("scheme").at("m") == 2);
  }
  SUBCASE("budget exhaustion exits with 4 and keeps the partial report") {
    const json table = {{"single_task", {{"a", 30.0}, {"b", 31.0}, {"c", 32.0}}},
                        {"mix_groups", {{"a+b", {{"a", 29.9}, {"b", 30.8}}}}},
                        {"uncovered_groups", "infeasible"}};
    const auto cfg = table_setup(dir, table, 1);
    const auto r = run({"group", "--config", cfg.string()});
    CHECK(r.code == 4);
    CHECK(json::parse(r.err).at("error").at("kind") == "budget");
    const auto doc = read_json_file(dir / "out" / "grouping.json");
    CHECK(doc.at("complete") == false);
    CHECK(doc.at("scheme").at("feasible") == true);
  }
  SUBCASE("uncovered groups raise a coverage error under the strict policy") {
    const json table = {{"single_task", {{"a", 30.0}, {"b", 31.0}, {"c", 32.0}}}, {"mix_groups", json::object()}};
    const auto cfg = table_setup(dir, table);
    CHECK(run({"group", "--config", cfg.string()}).code == 3);
  }
}

TEST_CASE("replay-table1 report") {
  test::TempDir dir("cli_replay");
  const auto r = run({"replay-table1", "--out", (dir / "r.json").string()});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  CHECK(doc == read_json_file(dir / "r.json"));
  CHECK(doc.at("all_feasible") == true);
  REQUIRE(doc.at("groups").size() == 4);
  CHECK(doc.at("groups")[0].at("delta_p").get<double>() == doctest::Approx(0.68));
  CHECK(doc.at("mean_gain_vs_single_task").get<double>() == doctest::Approx(0.09).epsilon(0.06));
  CHECK(doc.at("mean_gain_vs_baseline").get<double>() == doctest::Approx(2.24).epsilon(0.003));
  CHECK(run({"replay-table1", "--delta", "0"}).code == 2);
}

TEST_CASE("replay-similarity-gap report") {
  const auto r = run({"replay-similarity-gap"});
  REQUIRE(r.code == 0);
  const auto doc = json::parse(r.out);
  REQUIRE(doc.at("experiments").size() == 7);
  CHECK(doc.at("experiments")[0].at("consistent") == true);
  CHECK(doc.at("experiments")[6].at("consistent") == false);
}

TEST_CASE("make-smoke-corpus is reproducible") {
  test::TempDir dir("cli_smoke");
  const auto r = run({"make-smoke-corpus", "--out", (dir / "c").string(), "--size", "64"});
  REQUIRE(r.code == 0);
  const auto files = json::parse(r.out).at("files");
  CHECK(files.size() == 8);
  const auto images = smoke_corpus_images(64, 0);
  for (std::size_t i = 0; i < images.size(); ++i) {
    CHECK(to_bytes(load_image(files[i].get<std::string>())) == to_bytes(images[i]));
  }
  const auto full = smoke_corpus_images(256, 0);
  for (std::size_t i = 0; i < 8; ++i) {
    const auto bundled = data_dir() / "smoke_corpus" / ("smoke_0" + std::to_string(i) + ".png");
    CHECK(to_bytes(load_image(bundled)) == to_bytes(full[i]));
  }
}
