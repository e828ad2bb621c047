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
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "degroup/ggd.hpp"
#include "json.hpp"

namespace degroup {

struct LabeledFit {
  std::string id;
  GgdParams params;
};

/// Pairwise sym_log_kl distances. Diagonal and identical-fit pairs hold -infinity.
class SimilarityMatrix {
 public:
  SimilarityMatrix(std::vector<std::string> labels, std::vector<GgdParams> fits, std::vector<double> distances);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<GgdParams>& fits() const noexcept { return fits_; }
  double at(std::size_t i, std::size_t j) const { return distances_[i * labels_.size() + j]; }
  std::size_t index_of(const std::string& label) const;  ///< throws ValidationError
  /// Off-diagonal pairs whose fits coincide (distance is the sentinel).
  std::vector<std::pair<std::size_t, std::size_t>> degenerate_pairs() const;

 private:
  std::vector<std::string> labels_;
  std::vector<GgdParams> fits_;
  std::vector<double> distances_;
};

/// Throws ValidationError for fewer than two fits or duplicate labels.
SimilarityMatrix build_similarity_matrix(std::span<const LabeledFit> fits);

struct GroupStats {
  std::vector<std::size_t> group;
  double mean_distance = 0.0;
  double variance = 0.0;
};

/// Population mean and variance over the distinct unordered pairs of `group`.
/// A pair at the sentinel makes the mean -infinity with variance 0.
/// Throws ValidationError for singletons, duplicates or out-of-range indices.
GroupStats group_stats(const SimilarityMatrix& s, std::span<const std::size_t> group);
GroupStats group_stats(const SimilarityMatrix& s, std::span<const std::string> labels);

/// {"labels", "distances" (rows, sentinel as null), "fits": {id: {alpha, sigma, beta}}}
nlohmann::json to_json(const SimilarityMatrix& s);
SimilarityMatrix similarity_from_json(const nlohmann::json& doc);

nlohmann::json ggd_to_json(const GgdParams& p);
GgdParams ggd_from_json(const nlohmann::json& j);

}  // namespace degroup
