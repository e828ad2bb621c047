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

#include <bit>
#include <cmath>
#include <set>

#include "degroup/error.hpp"
#include "degroup/grouping.hpp"
#include "doctest.h"
#include "support.hpp"

using namespace degroup;

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

SearchConfig exact_config(double delta = 0.7) {
  SearchConfig cfg;
  cfg.delta = delta;
  cfg.tie_epsilon = 0.0;
  return cfg;
}

GroupMask bits(std::initializer_list<int> members) {
  GroupMask m = 0;
  for (int i : members) m |= GroupMask{1} << i;
  return m;
}

bool exact_cover(const PartitionScheme& s, std::size_t n) {
  GroupMask covered = 0;
  for (GroupMask g : s.groups) {
    if (g == 0 || (g & covered)) return false;
    covered |= g;
  }
  return covered == (GroupMask{1} << n) - 1;
}

/// Drop oracle that is feasible exactly on the listed masks (plus singletons).
test::DropOracle set_oracle(const std::vector<std::string>& labels, std::set<GroupMask> feasible) {
  return test::DropOracle([labels, feasible](std::span<const std::string> g) {
    return feasible.contains(labels_mask(g, labels)) ? 0.0 : 10.0;
  });
}

}  // namespace

TEST_CASE("masks and labels") {
  const auto labels = test::make_labels(4);
  CHECK(mask_members(bits({0, 2, 3})) == std::vector<std::size_t>{0, 2, 3});
  CHECK(mask_labels(bits({1, 3}), labels) == std::vector<std::string>{"d1", "d3"});
  const std::vector<std::string> g = {"d3", "d0"};
  CHECK(labels_mask(g, labels) == bits({0, 3}));
  const std::vector<std::string> bad = {"d9"};
  CHECK_THROWS_AS(labels_mask(bad, labels), ValidationError);
  CHECK_THROWS_AS(mask_labels(bits({5}), labels), ValidationError);
}

TEST_CASE("candidates are ranked by mean distance") {
  const auto labels = test::make_labels(3);
  const auto s = test::matrix_from(labels, {kNegInf, 1.0, 2.0, 1.0, kNegInf, 3.0, 2.0, 3.0, kNegInf});
  const auto pairs = enumerate_candidates(s, 2, 0.0);
  REQUIRE(pairs.groups.size() == 3);
  CHECK(pairs.groups[0].mask == bits({0, 1}));
  CHECK(pairs.groups[1].mask == bits({0, 2}));
  CHECK(pairs.groups[2].mask == bits({1, 2}));
  CHECK(pairs.groups[1].mean_distance == 2.0);

  const auto singles = enumerate_candidates(s, 1, 0.05);
  CHECK(singles.groups.size() == 3);
  CHECK(singles.groups[2].mask == bits({2}));
  CHECK(enumerate_candidates(s, 3, 0.05).groups.size() == 1);
  CHECK_THROWS_AS(enumerate_candidates(s, 4, 0.05), ValidationError);
  CHECK_THROWS_AS(enumerate_candidates(s, 0, 0.05), ValidationError);
}

TEST_CASE("near ties are broken by variance") {
  const auto labels = test::make_labels(4);
  // {0,1,2}: mean 1, variance 0. {0,1,3}: mean 0.98, variance about 0.63.
  std::vector<double> d(16, kNegInf);
  auto set = [&](int i, int j, double v) { d[i * 4 + j] = d[j * 4 + i] = v; };
  set(0, 1, 1.0);
  set(0, 2, 1.0);
  set(1, 2, 1.0);
  set(0, 3, 0.0);
  set(1, 3, 1.94);
  set(2, 3, 5.0);
  const auto s = test::matrix_from(labels, d);
  CHECK(enumerate_candidates(s, 3, 0.0).groups[0].mask == bits({0, 1, 3}));
  const auto tied = enumerate_candidates(s, 3, 0.05);
  CHECK(tied.groups[0].mask == bits({0, 1, 2}));
  CHECK(tied.groups[1].mask == bits({0, 1, 3}));

  // Exact ties with equal variance fall back to member labels.
  const auto flat = test::matrix_from(labels, {kNegInf, 1, 1, 1, 1, kNegInf, 1, 1, 1, 1, kNegInf, 1, 1, 1, 1, kNegInf});
  const auto level = enumerate_candidates(flat, 2, 0.0);
  CHECK(level.groups[0].mask == bits({0, 1}));
  CHECK(level.groups[5].mask == bits({2, 3}));
}

TEST_CASE("delta evaluator memoizes and skips singletons") {
  const auto labels = test::make_labels(3);
  test::DropOracle o([](std::span<const std::string> g) { return 0.1 * static_cast<double>(g.size()); });
  DeltaEvaluator eval(o, labels, 2);
  CHECK(eval.delta(bits({1})) == 0.0);
  CHECK(o.calls == 0);
  CHECK(eval.delta(bits({0, 1})) == doctest::Approx(0.2));
  CHECK(eval.delta(bits({0, 1})) == doctest::Approx(0.2));
  CHECK(eval.calls() == 1);
  CHECK(eval.known(bits({0, 2})) == std::nullopt);
  CHECK(eval.feasible(bits({0, 1, 2}), 0.31));
  CHECK_THROWS_AS(eval.delta(bits({1, 2})), BudgetExhausted);
  CHECK_THROWS_AS(eval.delta(0), ValidationError);
}

TEST_CASE("lmax and pruning under the latent model") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 4 + static_cast<std::size_t>(trial % 5);
    const auto model = test::random_latent_model(n, rng);
    test::DropOracle o([&](std::span<const std::string> g) { return model.drop(g); });
    const auto cfg = exact_config();
    DeltaEvaluator eval(o, model.s.labels());
    std::vector<CandidateLevel> levels(n + 1);
    for (std::size_t L = 1; L <= n; ++L) levels[L] = enumerate_candidates(model.s, L, 0.0);

    std::size_t expected_lmax = 1;
    for (std::size_t L = 2; L <= n; ++L) {
      if (model.drop(mask_labels(levels[L].groups.front().mask, model.s.labels())) <= cfg.delta) expected_lmax = L;
    }
    CHECK(find_lmax(levels, eval, cfg) == expected_lmax);

    for (std::size_t L = 2; L <= n; ++L) {
      std::size_t feasible = 0;
      for (const auto& c : levels[L].groups)
        feasible += model.drop(mask_labels(c.mask, model.s.labels())) <= cfg.delta;
      PruneStats st;
      const auto kept = prune_level(levels[L], eval, cfg, &st);
      CHECK(kept.groups.size() == feasible);
      CHECK(st.kept == feasible);
      CHECK(st.candidates == levels[L].groups.size());
      const auto bound = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(st.candidates)))) + 1;
      CHECK(st.probes <= bound);
    }
  }
}

TEST_CASE("search agrees with brute force under the latent model") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 6);
    const auto model = test::random_latent_model(n, rng);
    test::DropOracle o([&](std::span<const std::string> g) { return model.drop(g); });
    auto cfg = exact_config();
    cfg.emit_all_solutions = true;
    const auto r = grouping_search(model.s, o, cfg);
    DeltaEvaluator eval(o, model.s.labels());
    const auto bf = brute_force_min_partition(eval, n, cfg.delta);
    CAPTURE(trial);
    REQUIRE(r.complete);
    CHECK(r.scheme.m() == bf.m);
    CHECK(r.scheme.feasible);
    CHECK(exact_cover(r.scheme, n));
    for (std::size_t i = 0; i < r.scheme.groups.size(); ++i) {
      CHECK(r.scheme.delta_p[i] <= cfg.delta);
      CHECK(r.scheme.delta_p[i] == doctest::Approx(model.drop(mask_labels(r.scheme.groups[i], model.s.labels()))));
    }
    for (const auto& s : r.all_minimal) {
      CHECK(s.m() == bf.m);
      CHECK(exact_cover(s, n));
    }
    const auto verified = verify_scheme(r.scheme.groups, n, o, model.s.labels(), cfg.delta);
    CHECK(verified.feasible);
  }
}

TEST_CASE("singleton-only oracle gives m = n") {
  const auto labels = test::make_labels(5);
  std::mt19937_64 rng(1);
  const auto s = test::matrix_from(labels, test::random_distances(5, rng));
  test::DropOracle o([](std::span<const std::string>) { return 5.0; });
  const auto r = grouping_search(s, o, exact_config());
  CHECK(r.complete);
  CHECK(r.lmax == 1);
  CHECK(r.scheme.m() == 5);
  CHECK(r.scheme.feasible);
  CHECK(r.pruning.empty());
}

TEST_CASE("brute force on three degradations") {
  const auto labels = test::make_labels(3);
  auto o = set_oracle(labels, {bits({0, 2})});
  DeltaEvaluator eval(o, labels);
  const auto bf = brute_force_min_partition(eval, 3, 0.7);
  CHECK(bf.partitions == 5);
  CHECK(bf.m == 2);
  REQUIRE(bf.schemes.size() == 1);
  CHECK(std::set<GroupMask>(bf.schemes[0].groups.begin(), bf.schemes[0].groups.end()) ==
        std::set<GroupMask>{bits({0, 2}), bits({1})});
  CHECK(bf.oracle_calls == 4);

  std::vector<std::string> many = test::make_labels(13);
  DeltaEvaluator big(o, many);
  CHECK_THROWS_AS(brute_force_min_partition(big, 13, 0.7), ValidationError);
}

TEST_CASE("linear m search finds the minimum where feasibility is not monotone in m") {
  const auto labels = test::make_labels(6);
  std::vector<double> d(36, 3.0);
  for (int i = 0; i < 6; ++i) d[i * 6 + i] = kNegInf;
  auto set = [&](int i, int j, double v) { d[i * 6 + j] = d[j * 6 + i] = v; };
  for (auto [i, j] : {std::pair{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}}) set(i, j, 1.0);
  set(0, 3, 0.0);
  const auto s = test::matrix_from(labels, d);
  auto o = set_oracle(labels, {bits({0, 1, 2}), bits({3, 4, 5}), bits({0, 3})});

  auto cfg = exact_config();
  const auto binary = grouping_search(s, o, cfg);
  CHECK(binary.lmax == 3);
  CHECK(binary.scheme.m() == 4);

  cfg.m_search = MSearch::kLinear;
  const auto linear = grouping_search(s, o, cfg);
  CHECK(linear.scheme.m() == 2);
  CHECK(linear.scheme.feasible);

  DeltaEvaluator eval(o, labels);
  CHECK(brute_force_min_partition(eval, 6, 0.7).m == 2);
}

TEST_CASE("search is deterministic") {
  std::mt19937_64 rng(77);
  const auto model = test::random_latent_model(8, rng);
  test::DropOracle o([&](std::span<const std::string> g) { return model.drop(g); });
  SearchConfig cfg;
  const auto a = search_report(grouping_search(model.s, o, cfg), model.s.labels(), cfg);
  const auto b = search_report(grouping_search(model.s, o, cfg), model.s.labels(), cfg);
  CHECK(a == b);
  const auto scheme = scheme_from_json(a.at("scheme"), model.s.labels());
  CHECK(scheme.m() == a.at("scheme").at("m").get<std::size_t>());
}

TEST_CASE("budget exhaustion returns a partial result") {
  std::mt19937_64 rng(8);
  const auto model = test::random_latent_model(7, rng);
  test::DropOracle o([&](std::span<const std::string> g) { return model.drop(g); });
  auto cfg = exact_config();
  cfg.max_oracle_calls = 1;
  const auto r = grouping_search(model.s, o, cfg);
  CHECK(!r.complete);
  CHECK(!r.incomplete_reason.empty());
  CHECK(r.oracle_calls <= 1);
  CHECK(r.scheme.feasible);
  CHECK(exact_cover(r.scheme, 7));

  cfg.max_oracle_calls = 0;
  cfg.max_dfs_nodes = 1;
  const auto nodes = grouping_search(model.s, o, cfg);
  CHECK(!nodes.complete);
}

TEST_CASE("search config validation and size guard") {
  SearchConfig cfg;
  cfg.delta = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg.delta = 0.7;
  cfg.tie_epsilon = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);

  const auto labels = test::make_labels(21);
  std::mt19937_64 rng(2);
  const auto s = test::matrix_from(labels, test::random_distances(21, rng));
  test::DropOracle o([](std::span<const std::string>) { return 0.0; });
  CHECK_THROWS_AS(grouping_search(s, o, SearchConfig{}), ValidationError);
}

TEST_CASE("verify_scheme flags overlaps and gaps") {
  const auto labels = test::make_labels(3);
  test::DropOracle o([](std::span<const std::string>) { return 0.1; });
  const std::vector<GroupMask> overlap = {bits({0, 1}), bits({1, 2})};
  CHECK(!verify_scheme(overlap, 3, o, labels, 0.7).feasible);
  const std::vector<GroupMask> gap = {bits({0, 1})};
  CHECK(!verify_scheme(gap, 3, o, labels, 0.7).feasible);
  const std::vector<GroupMask> ok = {bits({0, 1}), bits({2})};
  CHECK(verify_scheme(ok, 3, o, labels, 0.7).feasible);
  CHECK(!verify_scheme(ok, 3, o, labels, 0.05).feasible);
}
