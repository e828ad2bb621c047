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

#include <cmath>
#include <fstream>

#include "degroup/config.hpp"
#include "degroup/error.hpp"
#include "degroup/json_io.hpp"
#include "degroup/oracle.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace degroup;
using nlohmann::json;

namespace {

std::filesystem::path oracle_file(const std::string& name) { return data_dir() / "oracle" / name; }

std::vector<PublishedGroup> published(const OracleTable& t) {
  std::vector<PublishedGroup> out;
  for (const auto& g : t.extra.at("published_groups"))
    out.push_back({g.at("name").get<std::string>(), g.at("members").get<std::vector<std::string>>()});
  return out;
}

/// Pair oracle whose configuration hash is settable.
class HashOracle final : public PerformanceOracle {
 public:
  PsnrMap evaluate(std::span<const std::string> group) override {
    ++calls;
    PsnrMap out;
    for (const auto& m : group) out[m] = 30.0 - 0.1 * static_cast<double>(group.size());
    if (group.size() == 3) {
      for (auto& [k, v] : out) v = -std::numeric_limits<double>::infinity();
    }
    return out;
  }
  double upper_bound(const std::string&) override { return 30.0; }
  std::string config_hash() const override { return hash; }

  std::string hash = "h1";
  std::size_t calls = 0;
};

const json kSmallTable = json::parse(R"({
  "single_task": {"a": 30.0, "b": 25.0, "c": 40.0},
  "mix_groups": {"a+b": {"a": 29.5, "b": 25.2}, "c": {"c": 39.0}},
  "source": "hand-made"
})");

}  // namespace

TEST_CASE("group keys are canonical") {
  const std::vector<std::string> g = {"sp", "blur", "jpeg"};
  CHECK(group_key(g) == "blur+jpeg+sp");
  CHECK(parse_group_key("blur+jpeg+sp") == std::vector<std::string>{"blur", "jpeg", "sp"});
  const std::vector<std::string> dup = {"a", "a"};
  CHECK_THROWS_AS(group_key(dup), ValidationError);
  CHECK_THROWS_AS(group_key(std::vector<std::string>{}), ValidationError);
  CHECK_THROWS_AS(parse_group_key("a++b"), ValidationError);
}

TEST_CASE("table oracle") {
  TableOracle o(oracle_table_from_json(kSmallTable));
  const std::vector<std::string> ab = {"b", "a"};
  CHECK(delta_p(o, ab) == doctest::Approx(0.5));
  const std::vector<std::string> c = {"c"};
  CHECK(delta_p(o, c) == doctest::Approx(1.0));
  const std::vector<std::string> b = {"b"};
  CHECK(delta_p(o, b) == 0.0);
  const std::vector<std::string> bc = {"b", "c"};
  CHECK_THROWS_AS(delta_p(o, bc), CoverageError);
  CHECK(o.table().extra.at("source") == "hand-made");
  CHECK(o.degradations() == std::vector<std::string>{"a", "b", "c"});

  auto infeasible = kSmallTable;
  infeasible["uncovered_groups"] = "infeasible";
  TableOracle oi(oracle_table_from_json(infeasible));
  CHECK(delta_p(oi, bc) == std::numeric_limits<double>::infinity());
  CHECK(o.config_hash() != oi.config_hash());

  const auto round = oracle_table_from_json(to_json(oi.table()));
  CHECK(round.mix_groups == oi.table().mix_groups);
  CHECK(round.uncovered == UncoveredPolicy::kInfeasible);
}

TEST_CASE("table loading errors") {
  auto missing_member = kSmallTable;
  missing_member["mix_groups"]["a+b"].erase("b");
  CHECK_THROWS_AS(oracle_table_from_json(missing_member), CoverageError);

  auto unknown = kSmallTable;
  unknown["mix_groups"]["a+z"] = {{"a", 1.0}, {"z", 1.0}};
  CHECK_THROWS_AS(oracle_table_from_json(unknown), CoverageError);

  auto dup = kSmallTable;
  dup["mix_groups"]["b+a"] = {{"a", 1.0}, {"b", 1.0}};
  CHECK_THROWS_AS(oracle_table_from_json(dup), ValidationError);

  auto extra = kSmallTable;
  extra["mix_groups"]["c"]["a"] = 3.0;
  CHECK_THROWS_AS(oracle_table_from_json(extra), ValidationError);

  auto not_number = kSmallTable;
  not_number["single_task"]["a"] = "30";
  CHECK_THROWS_AS(oracle_table_from_json(not_number), FormatError);

  CHECK_THROWS_AS(oracle_table_from_json(json::parse(R"({"mix_groups": {}})")), FormatError);
  try {
    load_oracle_table(oracle_file("nope.json"));
    FAIL("missing table loaded");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kFile);
  }
}

TEST_CASE("bundled restormer table") {
  TableOracle o(load_oracle_table(oracle_file("table1_restormer.json")));
  const auto groups = published(o.table());
  REQUIRE(groups.size() == 4);
  const auto report = replay_groups(o, groups, 0.7);
  const double expected[] = {0.68, 0.51, -0.05, -0.07};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(std::abs(report[i].delta_p - expected[i]) < 1e-9);
    CHECK(report[i].feasible);
  }
  CHECK(!replay_groups(o, groups, 0.6)[0].feasible);
  CHECK(std::abs(mean_gain(o, groups, o.table().single_task) - 0.09) < 0.005);
}

TEST_CASE("bundled srresnet table loads") {
  TableOracle o(load_oracle_table(oracle_file("table1_srresnet.json")));
  CHECK(o.degradations().size() == 11);
}

TEST_CASE("cached oracle") {
  test::TempDir dir("cache");
  const auto file = dir / "cache.json";
  HashOracle inner;
  const std::vector<std::string> ab = {"a", "b"};
  const std::vector<std::string> ba = {"b", "a"};
  const std::vector<std::string> abc = {"a", "b", "c"};
  {
    CachedOracle c(inner, file);
    CHECK(c.evaluate(ab) == c.evaluate(ba));
    CHECK(std::isinf(c.evaluate(abc).at("a")));
    CHECK(std::isinf(c.evaluate(abc).at("c")));
    CHECK(c.inner_calls() == 2);
    CHECK(c.hits() == 2);
    CHECK(inner.calls == 2);
    CHECK(c.warnings().empty());
  }
  CHECK(std::filesystem::exists(file));
  {
    CachedOracle c(inner, file);
    c.evaluate(ab);
    CHECK(c.evaluate(abc).at("b") == -std::numeric_limits<double>::infinity());
    CHECK(c.inner_calls() == 0);
    CHECK(inner.calls == 2);

    inner.hash = "h2";
    c.evaluate(ab);
    CHECK(c.inner_calls() == 1);
  }
  {
    std::ofstream(file) << "{ not json";
    CachedOracle c(inner, file);
    REQUIRE(c.warnings().size() == 1);
    CHECK(c.warnings()[0].find("corrupt") != std::string::npos);
    c.evaluate(ab);
    CHECK(c.inner_calls() == 1);
    CHECK(read_json_file(file).at("format") == "degroup-oracle-cache");
  }
  {
    CachedOracle memory_only(inner);
    memory_only.evaluate(ab);
    memory_only.evaluate(ab);
    CHECK(memory_only.hits() == 1);
  }
}

TEST_CASE("similarity gap replay") {
  const auto results = replay_similarity_gap(read_json_file(oracle_file("tab3_similarity_gap.json")));
  REQUIRE(results.size() == 7);
  for (std::size_t i = 0; i < results.size(); ++i) {
    CAPTURE(results[i].name);
    CHECK(results[i].consistent == (i < 4));
    CHECK(results[i].published.at("consistent").get<bool>() == results[i].consistent);
    CHECK(results[i].higher.distance < results[i].lower.distance);
  }
  const auto& e1 = results[0];
  CHECK(std::abs(e1.higher.mean_gain - 0.68) <= 0.005 + 1e-9);
  CHECK(std::abs(e1.lower.mean_gain - 0.26) <= 0.005 + 1e-9);
  CHECK(to_json(e1).at("consistent") == true);

  CHECK_THROWS_AS(replay_similarity_gap(json::object()), FormatError);
}
