/* Copyright 2026 The cpfl Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Independent reference computations used by the unit and acceptance tests.
// Nothing in here calls into the code paths it is used to check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace cpfl::oracle {

// Central finite-difference gradient of a scalar function.
inline std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& f,
                                       std::span<const double> x, double step = 1e-6) {
  std::vector<double> p(x.begin(), x.end());
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = p[i];
    p[i] = keep + step;
    const double up = f(p);
    p[i] = keep - step;
    const double down = f(p);
    p[i] = keep;
    g[i] = (up - down) / (2.0 * step);
  }
  return g;
}

// max_i |a_i - b_i| / max(1, max_i |b_i|): relative to the gradient's scale.
inline double relative_error(std::span<const double> a, std::span<const double> b) {
  double diff = 0.0, scale = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return diff / scale;
}

// Direct softmax cross-entropy, no max-shift, written from the definition.
inline double mean_cross_entropy(std::span<const double> params,
                                 const std::vector<std::vector<double>>& xs,
                                 const std::vector<std::size_t>& ys, std::size_t classes) {
  const std::size_t f = xs.front().size();
  double total = 0.0;
  for (std::size_t n = 0; n < xs.size(); ++n) {
    std::vector<double> z(classes);
    for (std::size_t c = 0; c < classes; ++c) {
      z[c] = params[c * (f + 1) + f];
      for (std::size_t j = 0; j < f; ++j) z[c] += params[c * (f + 1) + j] * xs[n][j];
    }
    double s = 0.0;
    for (double v : z) s += std::exp(v);
    total += std::log(s) - z[ys[n]];
  }
  return total / static_cast<double>(xs.size());
}

// log of the mean of Gaussian kernels, evaluated term by term in long double.
inline double kde_log_density(std::span<const double> x, const std::vector<std::vector<double>>& pts,
                              double lambda) {
  long double s = 0.0L;
  for (const auto& p : pts) {
    long double d2 = 0.0L;
    for (std::size_t i = 0; i < x.size(); ++i) d2 += (x[i] - p[i]) * (x[i] - p[i]);
    s += std::exp(-d2 / lambda);
  }
  return static_cast<double>(std::log(s / pts.size()));
}

// log2 C(d, k) as a sum of log2 ratios.
inline double log2_binomial(std::size_t d, std::size_t k) {
  double s = 0.0;
  for (std::size_t i = 0; i < k; ++i)
    s += std::log2(static_cast<double>(d - i)) - std::log2(static_cast<double>(i + 1));
  return s;
}

// C(d, k) for small arguments by Pascal's triangle.
inline unsigned long long binomial_small(std::size_t d, std::size_t k) {
  std::vector<std::vector<unsigned long long>> t(d + 1, std::vector<unsigned long long>(d + 1, 0));
  for (std::size_t n = 0; n <= d; ++n) {
    t[n][0] = 1;
    for (std::size_t j = 1; j <= n; ++j) t[n][j] = t[n - 1][j - 1] + (j <= n - 1 ? t[n - 1][j] : 0);
  }
  return k <= d ? t[d][k] : 0;
}

// ceil(log2 c) by counting doublings.
inline std::size_t ceil_log2(unsigned long long c) {
  std::size_t b = 0;
  unsigned long long v = 1;
  while (v < c) {
    v <<= 1;
    ++b;
  }
  return b;
}

// ECE by scanning every bin's interval ((m)/M, (m+1)/M] over all examples.
inline double brute_force_ece(const std::vector<double>& conf, const std::vector<bool>& correct,
                              std::size_t bins) {
  double ece = 0.0;
  const double n = static_cast<double>(conf.size());
  for (std::size_t m = 0; m < bins; ++m) {
    const double lo = static_cast<double>(m) / static_cast<double>(bins);
    const double hi = static_cast<double>(m + 1) / static_cast<double>(bins);
    double cnt = 0.0, acc = 0.0, cf = 0.0;
    for (std::size_t i = 0; i < conf.size(); ++i) {
      const bool in = (m == 0 ? conf[i] <= hi : (conf[i] > lo && conf[i] <= hi)) ||
                      (m + 1 == bins && conf[i] > hi);
      if (!in) continue;
      cnt += 1.0;
      acc += correct[i] ? 1.0 : 0.0;
      cf += conf[i];
    }
    if (cnt > 0.0) ece += cnt / n * std::abs(acc / cnt - cf / cnt);
  }
  return ece;
}

}  // namespace cpfl::oracle
