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

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "degroup/oracle.hpp"
#include "degroup/similarity.hpp"

namespace degroup::test {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag = "t") {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("degroup_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

/// Oracle defined by a drop function: every member scores upper - drop(group),
/// so delta_p(group) == drop(group). Counts evaluate calls.
class DropOracle final : public PerformanceOracle {
 public:
  using Drop = std::function<double(std::span<const std::string>)>;
  explicit DropOracle(Drop drop, double upper = 30.0) : drop_(std::move(drop)), upper_(upper) {}

  PsnrMap evaluate(std::span<const std::string> group) override {
    ++calls;
    const double d = drop_(group);
    PsnrMap out;
    for (const auto& m : group) out[m] = upper_ - d;
    return out;
  }
  double upper_bound(const std::string&) override { return upper_; }
  std::string config_hash() const override { return "drop-oracle"; }

  std::size_t calls = 0;

 private:
  Drop drop_;
  double upper_;
};

inline std::vector<std::string> make_labels(std::size_t n) {
  std::vector<std::string> labels;
  for (std::size_t i = 0; i < n; ++i) labels.push_back("d" + std::to_string(i));
  return labels;
}

/// Similarity matrix from explicit distances; fits are placeholders.
inline SimilarityMatrix matrix_from(const std::vector<std::string>& labels, const std::vector<double>& dist) {
  std::vector<GgdParams> fits;
  for (std::size_t i = 0; i < labels.size(); ++i) fits.emplace_back(1.0 + 0.1 * static_cast<double>(i), 1.0);
  return SimilarityMatrix(labels, fits, dist);
}

/// Random symmetric distances in [lo, hi), diagonal -inf.
inline std::vector<double> random_distances(std::size_t n, std::mt19937_64& rng, double lo = -3.0, double hi = 2.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> d(n * n, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) d[i * n + j] = d[j * n + i] = u(rng);
  return d;
}

inline double mean_pair_distance(const SimilarityMatrix& s, const std::vector<std::size_t>& idx) {
  double sum = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b) {
      sum += s.at(idx[a], idx[b]);
      ++pairs;
    }
  return pairs == 0 ? 0.0 : sum / static_cast<double>(pairs);
}

/// Latent monotone drop model: a singleton costs nothing, a larger group C costs
/// base + slope * (|C| - 2) + h * (mean pair distance - offset). Feasibility is
/// then monotone in group size and mean distance.
struct LatentModel {
  SimilarityMatrix s;
  double base = 0.5;
  double slope = 0.05;
  double h = 0.5;
  double offset = 0.0;

  double drop(std::span<const std::string> group) const {
    if (group.size() < 2) return 0.0;
    std::vector<std::size_t> idx;
    for (const auto& g : group) idx.push_back(s.index_of(g));
    return base + slope * static_cast<double>(group.size() - 2) + h * (mean_pair_distance(s, idx) - offset);
  }
};

inline LatentModel random_latent_model(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  LatentModel m{matrix_from(make_labels(n), random_distances(n, rng))};
  m.base = 0.2 + 0.5 * u(rng);
  m.slope = 0.1 * u(rng);
  m.h = 0.2 + 0.8 * u(rng);
  m.offset = -2.0 + 2.0 * u(rng);
  return m;
}

}  // namespace degroup::test
