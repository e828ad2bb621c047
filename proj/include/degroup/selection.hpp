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
#include <span>
#include <string>
#include <vector>

#include "degroup/features.hpp"
#include "degroup/ggd.hpp"
#include "degroup/image.hpp"
#include "json.hpp"

namespace degroup {

struct GroupProfile {
  std::string group_id;
  std::vector<std::string> members;
  std::vector<GgdParams> member_ggds;
  GgdParams avg_ggd;
};

/// Parameter-wise mean of alpha and of sigma; beta follows from the means.
GgdParams group_average_ggd(std::span<const GgdParams> member_ggds);

GroupProfile make_profile(std::string group_id, std::vector<std::string> members, std::vector<GgdParams> member_ggds);

enum class KlOrder {
  kGroupFirst,  ///< KL(group || input)
  kInputFirst,  ///< KL(input || group)
};

enum class Verdict { kInDistribution, kOutOfDistribution };

inline constexpr double kDefaultTau = 4.0;

struct GroupDivergence {
  std::string group_id;
  double divergence;
};

struct SelectionResult {
  std::string chosen_group_id;
  std::size_t chosen_index = 0;
  double divergence = 0.0;
  std::vector<GroupDivergence> per_group;
  Verdict verdict = Verdict::kInDistribution;
  double tau = kDefaultTau;
  KlOrder order = KlOrder::kGroupFirst;
};

/// Argmin of the per-group KL; ties go to the earlier profile. Verdict uses `tau`.
SelectionResult select_model(const GgdParams& input, std::span<const GroupProfile> profiles,
                             double tau = kDefaultTau, KlOrder order = KlOrder::kGroupFirst);

/// In distribution iff divergence <= tau.
Verdict predict_generalization(const SelectionResult& result, double tau);
Verdict predict_generalization(double divergence, double tau);

struct PatchConfig {
  std::size_t patch = 64;
  std::size_t stride = 32;
  std::size_t min_patches = 16;
};

/// Crops patches, extracts built-in features per patch, pools the centered
/// values and fits one GGD. Throws ShapeError when fewer than min_patches fit
/// and FitError for degenerate (e.g. constant) inputs.
GgdFit estimate_input_ggd(const Image& image, std::uint64_t bank_seed, const PatchConfig& cfg);
/// Same fit from externally extracted features.
GgdFit estimate_input_ggd(const FeatureTensor& features);

std::string_view to_string(Verdict v);
std::string_view to_string(KlOrder o);
KlOrder kl_order_from_string(std::string_view s);

nlohmann::json to_json(const GroupProfile& p);
GroupProfile profile_from_json(const nlohmann::json& j);
nlohmann::json to_json(const SelectionResult& r);
SelectionResult selection_from_json(const nlohmann::json& j);

}  // namespace degroup
