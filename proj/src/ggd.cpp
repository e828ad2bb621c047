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

#include "degroup/ggd.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "degroup/error.hpp"
#include "degroup/rng.hpp"
#include "degroup/simd/kernels.hpp"

namespace degroup {

double log_gamma(double x) {
  if (!(x > 0.0)) throw ValidationError("log_gamma requires x > 0");
  static constexpr std::array<double, 9> kCoef = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  constexpr double kG = 7.0;
  if (x < 0.5) {
    // Reflection keeps the series in its accurate range.
    return std::log(std::numbers::pi / std::sin(std::numbers::pi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double a = kCoef[0];
  for (std::size_t i = 1; i < kCoef.size(); ++i) a += kCoef[i] / (z + static_cast<double>(i));
  const double t = z + kG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

GgdParams::GgdParams(double alpha, double sigma) : alpha_(alpha), sigma_(sigma) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ValidationError("GGD alpha must be finite and > 0");
  if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ValidationError("GGD sigma must be finite and > 0");
  beta_ = sigma * std::exp(0.5 * (log_gamma(1.0 / alpha) - log_gamma(3.0 / alpha)));
}

double ggd_log_pdf(const GgdParams& p, double x) {
  const double a = p.alpha();
  return std::log(a / (2.0 * p.beta())) - log_gamma(1.0 / a) - std::pow(std::fabs(x) / p.beta(), a);
}

double ggd_pdf(const GgdParams& p, double x) { return std::exp(ggd_log_pdf(p, x)); }

double ggd_moment_ratio(double alpha) {
  return std::exp(2.0 * log_gamma(2.0 / alpha) - log_gamma(1.0 / alpha) - log_gamma(3.0 / alpha));
}

GgdFit fit_ggd(std::span<const double> samples, std::size_t min_count) {
  if (samples.size() < min_count) {
    throw FitError("GGD fit needs at least " + std::to_string(min_count) + " samples, got " +
                   std::to_string(samples.size()));
  }
  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  if (*lo_it == *hi_it) throw FitError("GGD fit: all samples identical (zero variance)");
  const simd::Moments m = simd::abs_moments(samples);
  const double n = static_cast<double>(samples.size());
  const double m1 = m.sum_abs / n;
  const double m2 = m.sum_sq / n;
  if (!std::isfinite(m2)) throw FitError("GGD fit: non-finite samples");
  if (std::sqrt(m2) <= 1e-12) throw FitError("GGD fit: degenerate zero-variance samples");

  const double target = m1 * m1 / m2;
  GgdFit fit{GgdParams(kAlphaMin, std::sqrt(m2)), false, samples.size()};
  double alpha;
  if (target <= ggd_moment_ratio(kAlphaMin)) {
    alpha = kAlphaMin;
    fit.clamped = true;
  } else if (target >= ggd_moment_ratio(kAlphaMax)) {
    alpha = kAlphaMax;
    fit.clamped = true;
  } else {
    double lo = kAlphaMin;
    double hi = kAlphaMax;
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      (ggd_moment_ratio(mid) < target ? lo : hi) = mid;
    }
    alpha = 0.5 * (lo + hi);
  }
  fit.params = GgdParams(alpha, std::sqrt(m2));
  return fit;
}

double kl_ggd(const GgdParams& p, const GgdParams& q) {
  if (p == q) return 0.0;
  const double ap = p.alpha();
  const double aq = q.alpha();
  const double log_ratio = std::log(ap / aq) + std::log(q.beta() / p.beta()) +
                           log_gamma(1.0 / aq) - log_gamma(1.0 / ap);
  const double cross = std::exp(aq * std::log(p.beta() / q.beta()) +
                                log_gamma((aq + 1.0) / ap) - log_gamma(1.0 / ap));
  return std::max(0.0, log_ratio + cross - 1.0 / ap);
}

double sym_log_kl(const GgdParams& p, const GgdParams& q) {
  if (p == q) return -std::numeric_limits<double>::infinity();
  const double sym = 0.5 * (kl_ggd(p, q) + kl_ggd(q, p));
  if (sym <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(sym);
}

std::vector<double> sample_ggd(const GgdParams& p, std::size_t count, std::uint64_t seed) {
  CounterRng rng(seed, stream_id("sample_ggd"));
  std::vector<double> out(count);
  const double shape = 1.0 / p.alpha();
  for (double& v : out) {
    const double magnitude = p.beta() * std::pow(rng.gamma(shape), 1.0 / p.alpha());
    v = rng.uniform() < 0.5 ? -magnitude : magnitude;
  }
  return out;
}

}  // namespace degroup
