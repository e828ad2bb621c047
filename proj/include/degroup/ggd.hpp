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
#include <vector>

namespace degroup {

inline constexpr double kAlphaMin = 0.1;
inline constexpr double kAlphaMax = 10.0;

/// ln Gamma(x) for x > 0 by the Lanczos approximation (g = 7, 9 terms).
double log_gamma(double x);

/// Zero-mean generalized Gaussian with shape alpha and standard deviation sigma.
/// beta = sigma * sqrt(Gamma(1/alpha) / Gamma(3/alpha)) is the scale in the density.
class GgdParams {
 public:
  GgdParams(double alpha, double sigma);

  double alpha() const noexcept { return alpha_; }
  double sigma() const noexcept { return sigma_; }
  double beta() const noexcept { return beta_; }

  friend bool operator==(const GgdParams& a, const GgdParams& b) {
    return a.alpha_ == b.alpha_ && a.sigma_ == b.sigma_;
  }

 private:
  double alpha_;
  double sigma_;
  double beta_;
};

double ggd_log_pdf(const GgdParams& p, double x);
double ggd_pdf(const GgdParams& p, double x);

/// Moment ratio (E|x|)^2 / E[x^2] of a GGD with shape alpha. Increasing in alpha.
double ggd_moment_ratio(double alpha);

struct GgdFit {
  GgdParams params;
  bool clamped = false;  ///< moment ratio fell outside [ratio(0.1), ratio(10)]
  std::size_t count = 0;
};

inline constexpr std::size_t kMinFitSamples = 1000;

/// Moment-matching fit: m1 = mean|x|, m2 = mean x^2, alpha solves
/// ratio(alpha) = m1^2 / m2 by bisection on [0.1, 10] to 1e-6, sigma = sqrt(m2).
/// Throws FitError for fewer than `min_count` samples or (near) zero variance.
GgdFit fit_ggd(std::span<const double> samples, std::size_t min_count = kMinFitSamples);

/// Closed-form KL(p || q) between two zero-mean GGDs.
double kl_ggd(const GgdParams& p, const GgdParams& q);

/// ln((KL(p||q) + KL(q||p)) / 2); -infinity when p == q.
double sym_log_kl(const GgdParams& p, const GgdParams& q);

/// i.i.d. draws via |x| = beta * G^(1/alpha), G ~ Gamma(1/alpha, 1), random sign.
std::vector<double> sample_ggd(const GgdParams& p, std::size_t count, std::uint64_t seed);

}  // namespace degroup
