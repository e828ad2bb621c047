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
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "degroup/degrade.hpp"
#include "degroup/image.hpp"
#include "degroup/oracle.hpp"
#include "json.hpp"

namespace degroup {

struct ProxyConfig {
  std::size_t patch = 5;            ///< odd side of the restorer's receptive field
  double lambda = 1e-3;             ///< ridge weight toward the identity filter, scaled by the sample count
  double holdout_fraction = 0.25;   ///< share of corpus images held out for scoring
  std::size_t sample_stride = 2;    ///< training pixels are taken on this grid
  std::uint64_t seed = 0;

  void validate() const;  ///< throws ConfigError
};

nlohmann::json to_json(const ProxyConfig& cfg);
/// Missing keys take defaults; unknown keys raise ConfigError.
ProxyConfig proxy_config_from_json(const nlohmann::json& j);

/// Desk-scale stand-in for training: one linear p x p patch restorer (plus a
/// bias) fitted by ridge regression on the union of the group's training pairs,
/// scored by mean held-out PSNR per degradation. Shared across channels.
class ProxyOracle final : public PerformanceOracle {
 public:
  /// Loads the degraded corpus listed in `manifest` together with its clean
  /// sources. Throws DataError when a degradation lacks training or held-out
  /// images or has fewer than 10 * patch^2 training samples.
  ProxyOracle(const CorpusManifest& manifest, ProxyConfig cfg);

  PsnrMap evaluate(std::span<const std::string> group) override;
  double upper_bound(const std::string& id) override;
  std::string config_hash() const override { return hash_; }
  double cost(std::span<const std::string> group) const override;

  std::vector<std::string> degradations() const;
  /// Mean held-out PSNR of the unrestored degraded images.
  double identity_psnr(const std::string& id) const;
  /// Held-out source paths (shared by every degradation).
  const std::vector<std::string>& holdout_sources() const noexcept { return holdout_; }

 private:
  struct Pair {
    Image clean;
    Image degraded;
  };
  struct Normal {
    std::vector<double> gram;  ///< (k+1)^2, row-major
    std::vector<double> rhs;   ///< k+1
    double samples = 0.0;
  };

  std::vector<double> solve(std::span<const std::string> group) const;
  double score(const std::string& id, const std::vector<double>& weights) const;

  ProxyConfig cfg_;
  std::string hash_;
  std::vector<std::string> holdout_;
  std::map<std::string, std::vector<Pair>> train_;
  std::map<std::string, std::vector<Pair>> test_;
  std::map<std::string, Normal> normals_;
  std::mutex upper_mutex_;
  std::map<std::string, double> upper_;
};

}  // namespace degroup
