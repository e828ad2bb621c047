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

#include "degroup/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "degroup/error.hpp"

namespace degroup {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}

SimilarityMatrix::SimilarityMatrix(std::vector<std::string> labels, std::vector<GgdParams> fits,
                                   std::vector<double> distances)
    : labels_(std::move(labels)), fits_(std::move(fits)), distances_(std::move(distances)) {
  const std::size_t n = labels_.size();
  if (fits_.size() != n || distances_.size() != n * n) {
    throw ShapeError("similarity matrix: labels, fits and distances disagree in size");
  }
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != n) {
    throw ValidationError("similarity matrix: duplicate labels");
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double a = at(i, j);
      if (std::isnan(a) || a == std::numeric_limits<double>::infinity()) {
        throw ValidationError("similarity matrix: invalid distance");
      }
      if (i != j && !(a == at(j, i))) throw ValidationError("similarity matrix is not symmetric");
    }
  }
}

std::size_t SimilarityMatrix::index_of(const std::string& label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw ValidationError("unknown degradation label '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

std::vector<std::pair<std::size_t, std::size_t>> SimilarityMatrix::degenerate_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < size(); ++i)
    for (std::size_t j = i + 1; j < size(); ++j)
      if (at(i, j) == kNegInf) out.emplace_back(i, j);
  return out;
}

SimilarityMatrix build_similarity_matrix(std::span<const LabeledFit> fits) {
  const std::size_t n = fits.size();
  if (n < 2) throw ValidationError("similarity matrix needs at least two degradations");
  std::vector<std::string> labels;
  std::vector<GgdParams> params;
  for (const auto& f : fits) {
    labels.push_back(f.id);
    params.push_back(f.params);
  }
  std::vector<double> d(n * n, kNegInf);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      d[i * n + j] = d[j * n + i] = sym_log_kl(params[i], params[j]);
    }
  }
  return SimilarityMatrix(std::move(labels), std::move(params), std::move(d));
}

GroupStats group_stats(const SimilarityMatrix& s, std::span<const std::size_t> group) {
  if (group.size() < 2) throw ValidationError("group_stats needs at least two members");
  for (std::size_t i = 0; i < group.size(); ++i) {
    if (group[i] >= s.size()) throw ValidationError("group_stats: index out of range");
    for (std::size_t j = 0; j < i; ++j)
      if (group[i] == group[j]) throw ValidationError("group_stats: duplicate member");
  }
  GroupStats out{{group.begin(), group.end()}, 0.0, 0.0};
  double sum = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      const double v = s.at(group[i], group[j]);
      if (v == kNegInf) {
        out.mean_distance = kNegInf;
        return out;
      }
      sum += v;
      pairs += 1.0;
    }
  }
  const double mean = sum / pairs;
  double ss = 0.0;
  for (std::size_t i = 0; i < group.size(); ++i) {
    for (std::size_t j = i + 1; j < group.size(); ++j) {
      const double dv = s.at(group[i], group[j]) - mean;
      ss += dv * dv;
    }
  }
  out.mean_distance = mean;
  out.variance = ss / pairs;
  return out;
}

GroupStats group_stats(const SimilarityMatrix& s, std::span<const std::string> labels) {
  std::vector<std::size_t> idx;
  for (const auto& l : labels) idx.push_back(s.index_of(l));
  return group_stats(s, idx);
}

nlohmann::json ggd_to_json(const GgdParams& p) {
  return {{"alpha", p.alpha()}, {"sigma", p.sigma()}, {"beta", p.beta()}};
}

GgdParams ggd_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("alpha") || !j.contains("sigma") || !j["alpha"].is_number() ||
      !j["sigma"].is_number()) {
    throw FormatError("GGD entry needs numeric 'alpha' and 'sigma'");
  }
  return GgdParams(j["alpha"].get<double>(), j["sigma"].get<double>());
}

nlohmann::json to_json(const SimilarityMatrix& s) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < s.size(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < s.size(); ++j) {
      const double v = s.at(i, j);
      if (v == kNegInf)
        row.push_back(nullptr);
      else
        row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  nlohmann::json fits = nlohmann::json::object();
  for (std::size_t i = 0; i < s.size(); ++i) fits[s.labels()[i]] = ggd_to_json(s.fits()[i]);
  nlohmann::json degenerate = nlohmann::json::array();
  for (auto [i, j] : s.degenerate_pairs()) degenerate.push_back({s.labels()[i], s.labels()[j]});
  return {{"labels", s.labels()}, {"distances", rows}, {"fits", fits}, {"degenerate_pairs", degenerate}};
}

SimilarityMatrix similarity_from_json(const nlohmann::json& doc) {
  if (!doc.is_object() || !doc.contains("labels") || !doc.contains("distances") || !doc.contains("fits")) {
    throw FormatError("similarity JSON needs 'labels', 'distances' and 'fits'");
  }
  const auto labels = doc["labels"].get<std::vector<std::string>>();
  const std::size_t n = labels.size();
  const auto& rows = doc["distances"];
  if (!rows.is_array() || rows.size() != n) throw FormatError("similarity JSON: distances must have one row per label");
  std::vector<double> d;
  d.reserve(n * n);
  for (const auto& row : rows) {
    if (!row.is_array() || row.size() != n) throw FormatError("similarity JSON: ragged distance row");
    for (const auto& v : row) {
      if (v.is_null())
        d.push_back(kNegInf);
      else if (v.is_number())
        d.push_back(v.get<double>());
      else
        throw FormatError("similarity JSON: distance must be a number or null");
    }
  }
  std::vector<GgdParams> fits;
  for (const auto& l : labels) {
    if (!doc["fits"].contains(l)) throw FormatError("similarity JSON: no fit for '" + l + "'");
    fits.push_back(ggd_from_json(doc["fits"][l]));
  }
  return SimilarityMatrix(labels, std::move(fits), std::move(d));
}

}  // namespace degroup
