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

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

#include "degroup/ggd.hpp"

namespace degroup::test {

// Numerical references for the closed forms, integrating the log densities
// directly. Both densities are even, so only [0, inf) is integrated. The
// half line is split at a few multiples of the wider scale so each piece
// stays smooth enough for tanh-sinh.

template <typename F>
double integrate_half_line(F f, double scale) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const double cuts[] = {0.0, 0.25 * scale, scale, 4.0 * scale, 16.0 * scale};
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < std::size(cuts); ++i) total += ts.integrate(f, cuts[i], cuts[i + 1]);
  total += ts.integrate(f, cuts[std::size(cuts) - 1], std::numeric_limits<double>::infinity());
  return 2.0 * total;
}

inline double numeric_kl(const GgdParams& p, const GgdParams& q) {
  auto f = [&](double x) {
    const double lp = ggd_log_pdf(p, x);
    if (lp < -745.0) return 0.0;
    return std::exp(lp) * (lp - ggd_log_pdf(q, x));
  };
  return integrate_half_line(f, std::max(p.beta(), q.beta()));
}

inline double numeric_mass(const GgdParams& p) {
  return integrate_half_line([&](double x) { return ggd_pdf(p, x); }, p.beta());
}

inline double numeric_variance(const GgdParams& p) {
  return integrate_half_line([&](double x) { return x * x * ggd_pdf(p, x); }, p.beta());
}

}  // namespace degroup::test
