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

#include "degroup/proxy_oracle.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <set>

#include "degroup/error.hpp"
#include "degroup/filter.hpp"
#include "degroup/hash.hpp"
#include "degroup/rng.hpp"

namespace degroup {

void ProxyConfig::validate() const {
  if (patch < 1 || patch % 2 == 0 || patch > 15) throw ConfigError("proxy.patch must be odd and in [1, 15]");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("proxy.lambda must be >= 0");
  if (!(holdout_fraction > 0.0 && holdout_fraction < 1.0)) {
    throw ConfigError("proxy.holdout_fraction must be in (0, 1)");
  }
  if (sample_stride < 1) throw ConfigError("proxy.sample_stride must be >= 1");
}

nlohmann::json to_json(const ProxyConfig& cfg) {
  return {{"patch", cfg.patch},
          {"lambda", cfg.lambda},
          {"holdout_fraction", cfg.holdout_fraction},
          {"sample_stride", cfg.sample_stride},
          {"seed", cfg.seed}};
}

ProxyConfig proxy_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("proxy config must be an object");
  ProxyConfig cfg;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "patch")
        cfg.patch = v.get<std::size_t>();
      else if (key == "lambda")
        cfg.lambda = v.get<double>();
      else if (key == "holdout_fraction")
        cfg.holdout_fraction = v.get<double>();
      else if (key == "sample_stride")
        cfg.sample_stride = v.get<std::size_t>();
      else if (key == "seed")
        cfg.seed = v.get<std::uint64_t>();
      else
        throw ConfigError("unknown proxy config key '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("proxy config key '" + key + "' has the wrong type");
    }
  }
  cfg.validate();
  return cfg;
}

ProxyOracle::ProxyOracle(const CorpusManifest& manifest, ProxyConfig cfg) : cfg_(cfg) {
  cfg_.validate();
  if (manifest.entries.empty()) throw DataError("proxy oracle: manifest has no entries");

  std::vector<std::string> sources;
  for (const auto& e : manifest.entries) sources.push_back(e.source);
  std::sort(sources.begin(), sources.end());
  sources.erase(std::unique(sources.begin(), sources.end()), sources.end());
  CounterRng rng(cfg_.seed, stream_id("proxy_split"));
  for (std::size_t i = sources.size(); i > 1; --i) std::swap(sources[i - 1], sources[rng.below(i)]);
  const auto n_hold = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::llround(cfg_.holdout_fraction * static_cast<double>(sources.size()))));
  if (n_hold >= sources.size()) {
    throw DataError("proxy oracle needs at least two corpus images for a train/held-out split");
  }
  holdout_.assign(sources.begin(), sources.begin() + static_cast<std::ptrdiff_t>(n_hold));
  std::sort(holdout_.begin(), holdout_.end());
  const std::set<std::string> hold(holdout_.begin(), holdout_.end());

  std::map<std::string, Image> clean;
  std::vector<ManifestEntry> entries = manifest.entries;
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
    return std::tie(a.degradation, a.source) < std::tie(b.degradation, b.source);
  });
  std::uint64_t h = fnv1a64(to_json(cfg_).dump());
  for (const auto& e : entries) {
    if (!clean.contains(e.source)) clean.emplace(e.source, load_image(e.source));
    Pair p{clean.at(e.source), load_image(e.output)};
    if (!p.clean.same_shape(p.degraded)) throw DataError("degraded image shape differs from source: " + e.output);
    (hold.contains(e.source) ? test_ : train_)[e.degradation].push_back(std::move(p));
    h = fnv1a64(e.degradation + "|" + std::filesystem::path(e.source).filename().string() + "|" + e.checksum, h);
  }
  hash_ = "proxy-" + to_hex(h);

  const std::size_t k = cfg_.patch * cfg_.patch;
  const std::size_t dim = k + 1;
  const auto r = static_cast<std::ptrdiff_t>(cfg_.patch / 2);
  for (const auto& [id, pairs] : train_) {
    if (!test_.contains(id)) throw DataError("proxy oracle: no held-out images for '" + id + "'");
    Normal nrm{std::vector<double>(dim * dim, 0.0), std::vector<double>(dim, 0.0), 0.0};
    std::vector<double> f(dim);
    for (const auto& pair : pairs) {
      for (std::size_t c = 0; c < pair.degraded.channels(); ++c) {
        const Plane src = pair.degraded.channel(c);
        const Plane padded = pad_reflect(src, static_cast<std::size_t>(r), static_cast<std::size_t>(r),
                                         static_cast<std::size_t>(r), static_cast<std::size_t>(r));
        for (std::size_t y = 0; y < src.height; y += cfg_.sample_stride) {
          for (std::size_t x = 0; x < src.width; x += cfg_.sample_stride) {
            std::size_t t = 0;
            for (std::size_t dy = 0; dy < cfg_.patch; ++dy)
              for (std::size_t dx = 0; dx < cfg_.patch; ++dx) f[t++] = padded.at(y + dy, x + dx);
            f[k] = 1.0;
            const double target = pair.clean.at(y, x, c);
            for (std::size_t a = 0; a < dim; ++a) {
              const double fa = f[a];
              nrm.rhs[a] += fa * target;
              for (std::size_t b = a; b < dim; ++b) nrm.gram[a * dim + b] += fa * f[b];
            }
            nrm.samples += 1.0;
          }
        }
      }
    }
    if (nrm.samples < 10.0 * static_cast<double>(k)) {
      throw DataError("proxy oracle: '" + id + "' has " + std::to_string(static_cast<std::size_t>(nrm.samples)) +
                      " training samples, needs at least " + std::to_string(10 * k));
    }
    for (std::size_t a = 0; a < dim; ++a)
      for (std::size_t b = 0; b < a; ++b) nrm.gram[a * dim + b] = nrm.gram[b * dim + a];
    normals_.emplace(id, std::move(nrm));
  }
  for (const auto& [id, pairs] : test_) {
    if (!train_.contains(id)) throw DataError("proxy oracle: no training images for '" + id + "'");
  }
}

std::vector<std::string> ProxyOracle::degradations() const {
  std::vector<std::string> out;
  for (const auto& [id, n] : normals_) out.push_back(id);
  return out;
}

std::vector<double> ProxyOracle::solve(std::span<const std::string> group) const {
  const std::size_t dim = cfg_.patch * cfg_.patch + 1;
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  double samples = 0.0;
  // Accumulate in sorted id order so the sum does not depend on listing order.
  std::vector<std::string> ids(group.begin(), group.end());
  std::sort(ids.begin(), ids.end());
  for (const auto& id : ids) {
    const auto it = normals_.find(id);
    if (it == normals_.end()) throw CoverageError("proxy oracle has no data for '" + id + "'");
    const Normal& n = it->second;
    for (std::size_t i = 0; i < dim; ++i) {
      b(static_cast<Eigen::Index>(i)) += n.rhs[i];
      for (std::size_t j = 0; j < dim; ++j)
        a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) += n.gram[i * dim + j];
    }
    samples += n.samples;
  }
  // Ridge toward the identity filter (center tap 1, other taps and bias 0).
  const double reg = cfg_.lambda * samples;
  for (std::size_t i = 0; i < dim; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += reg;
  b(static_cast<Eigen::Index>((cfg_.patch / 2) * cfg_.patch + cfg_.patch / 2)) += reg;
  const Eigen::VectorXd w = a.ldlt().solve(b);
  if (!w.allFinite()) throw DataError("proxy oracle: singular normal equations for group " + group_key(group));
  return {w.data(), w.data() + w.size()};
}

double ProxyOracle::score(const std::string& id, const std::vector<double>& weights) const {
  Kernel2d kernel(cfg_.patch, cfg_.patch);
  std::copy(weights.begin(), weights.end() - 1, kernel.taps.begin());
  const double bias = weights.back();
  double total = 0.0;
  const auto& pairs = test_.at(id);
  for (const auto& p : pairs) {
    const Image restored = map_channels(p.degraded, [&](const Plane& plane) {
      Plane out = correlate(plane, kernel);
      for (double& v : out.data) v += bias;
      return out;
    });
    total += psnr(p.clean, restored);
  }
  return total / static_cast<double>(pairs.size());
}

PsnrMap ProxyOracle::evaluate(std::span<const std::string> group) {
  group_key(group);
  const auto weights = solve(group);
  PsnrMap out;
  for (const auto& id : group) out[id] = score(id, weights);
  return out;
}

double ProxyOracle::upper_bound(const std::string& id) {
  {
    std::lock_guard lock(upper_mutex_);
    if (const auto it = upper_.find(id); it != upper_.end()) return it->second;
  }
  const std::string single[] = {id};
  const double v = evaluate(single).at(id);
  std::lock_guard lock(upper_mutex_);
  upper_[id] = v;
  return v;
}

double ProxyOracle::cost(std::span<const std::string> group) const {
  double total = 0.0;
  for (const auto& id : group) {
    if (const auto it = normals_.find(id); it != normals_.end()) total += it->second.samples;
  }
  return total;
}

double ProxyOracle::identity_psnr(const std::string& id) const {
  const auto it = test_.find(id);
  if (it == test_.end()) throw CoverageError("proxy oracle has no data for '" + id + "'");
  double total = 0.0;
  for (const auto& p : it->second) total += psnr(p.clean, p.degraded);
  return total / static_cast<double>(it->second.size());
}

}  // namespace degroup
