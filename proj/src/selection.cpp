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

#include "degroup/selection.hpp"

#include "degroup/error.hpp"
#include "degroup/similarity.hpp"

namespace degroup {

GgdParams group_average_ggd(std::span<const GgdParams> member_ggds) {
  if (member_ggds.empty()) throw ValidationError("group average of no members");
  double a = 0.0;
  double s = 0.0;
  for (const auto& g : member_ggds) {
    a += g.alpha();
    s += g.sigma();
  }
  const double n = static_cast<double>(member_ggds.size());
  return GgdParams(a / n, s / n);
}

GroupProfile make_profile(std::string group_id, std::vector<std::string> members, std::vector<GgdParams> member_ggds) {
  if (members.size() != member_ggds.size()) throw ValidationError("profile members and fits disagree");
  const GgdParams avg = group_average_ggd(member_ggds);
  return GroupProfile{std::move(group_id), std::move(members), std::move(member_ggds), avg};
}

SelectionResult select_model(const GgdParams& input, std::span<const GroupProfile> profiles, double tau,
                             KlOrder order) {
  if (profiles.empty()) throw ValidationError("select_model needs at least one profile");
  SelectionResult r;
  r.tau = tau;
  r.order = order;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const auto& p = profiles[i];
    const double d = order == KlOrder::kGroupFirst ? kl_ggd(p.avg_ggd, input) : kl_ggd(input, p.avg_ggd);
    r.per_group.push_back({p.group_id, d});
    if (i == 0 || d < r.divergence) {
      r.divergence = d;
      r.chosen_index = i;
      r.chosen_group_id = p.group_id;
    }
  }
  r.verdict = predict_generalization(r.divergence, tau);
  return r;
}

Verdict predict_generalization(double divergence, double tau) {
  return divergence <= tau ? Verdict::kInDistribution : Verdict::kOutOfDistribution;
}

Verdict predict_generalization(const SelectionResult& result, double tau) {
  return predict_generalization(result.divergence, tau);
}

GgdFit estimate_input_ggd(const Image& image, std::uint64_t bank_seed, const PatchConfig& cfg) {
  if (cfg.patch < 2 || cfg.stride < 1) throw ConfigError("patch must be >= 2 and stride >= 1");
  const PatchSet patches = crop_patches(image, cfg.patch, cfg.stride);
  if (patches.patches.size() < cfg.min_patches) {
    throw ShapeError("image yields " + std::to_string(patches.patches.size()) + " patches of " +
                     std::to_string(cfg.patch) + " px, need at least " + std::to_string(cfg.min_patches));
  }
  return estimate_input_ggd(extract_builtin(patches.patches, bank_seed));
}

GgdFit estimate_input_ggd(const FeatureTensor& features) {
  const SampleVector s = center_and_flatten(features);
  return fit_ggd(s.values);
}

std::string_view to_string(Verdict v) {
  return v == Verdict::kInDistribution ? "in-distribution" : "out-of-distribution";
}

std::string_view to_string(KlOrder o) { return o == KlOrder::kGroupFirst ? "group_first" : "input_first"; }

KlOrder kl_order_from_string(std::string_view s) {
  if (s == "group_first") return KlOrder::kGroupFirst;
  if (s == "input_first") return KlOrder::kInputFirst;
  throw ConfigError("kl_order must be \"group_first\" or \"input_first\"");
}

nlohmann::json to_json(const GroupProfile& p) {
  nlohmann::json members = nlohmann::json::object();
  for (std::size_t i = 0; i < p.members.size(); ++i) members[p.members[i]] = ggd_to_json(p.member_ggds[i]);
  return {{"group_id", p.group_id}, {"members", p.members}, {"member_ggds", members}, {"avg_ggd", ggd_to_json(p.avg_ggd)}};
}

GroupProfile profile_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("group_id") || !j.contains("members") || !j.contains("member_ggds")) {
    throw FormatError("profile needs 'group_id', 'members' and 'member_ggds'");
  }
  auto members = j["members"].get<std::vector<std::string>>();
  std::vector<GgdParams> fits;
  for (const auto& m : members) {
    if (!j["member_ggds"].contains(m)) throw FormatError("profile has no GGD for member '" + m + "'");
    fits.push_back(ggd_from_json(j["member_ggds"][m]));
  }
  return make_profile(j["group_id"].get<std::string>(), std::move(members), std::move(fits));
}

nlohmann::json to_json(const SelectionResult& r) {
  nlohmann::json per = nlohmann::json::array();
  for (const auto& g : r.per_group) per.push_back({{"group_id", g.group_id}, {"divergence", g.divergence}});
  return {{"chosen_group_id", r.chosen_group_id},
          {"divergence", r.divergence},
          {"per_group", per},
          {"verdict", to_string(r.verdict)},
          {"tau", r.tau},
          {"kl_order", to_string(r.order)}};
}

SelectionResult selection_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("chosen_group_id") || !j.contains("divergence") || !j.contains("per_group")) {
    throw FormatError("selection report needs 'chosen_group_id', 'divergence' and 'per_group'");
  }
  SelectionResult r;
  r.chosen_group_id = j["chosen_group_id"].get<std::string>();
  r.divergence = j["divergence"].get<double>();
  for (const auto& g : j["per_group"]) {
    r.per_group.push_back({g.at("group_id").get<std::string>(), g.at("divergence").get<double>()});
    if (r.per_group.back().group_id == r.chosen_group_id) r.chosen_index = r.per_group.size() - 1;
  }
  r.tau = j.value("tau", kDefaultTau);
  r.order = kl_order_from_string(j.value("kl_order", "group_first"));
  r.verdict = predict_generalization(r.divergence, r.tau);
  return r;
}

}  // namespace degroup
