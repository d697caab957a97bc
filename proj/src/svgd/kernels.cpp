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

#include "cpfl/svgd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "cpfl/core/error.hpp"

namespace cpfl::svgd {

void KernelConfig::validate() const {
  require(kde_bandwidth > 0.0, "KDE bandwidth must be positive");
  require(bandwidth_floor > 0.0, "bandwidth floor must be positive");
  if (const auto* f = std::get_if<FixedBandwidth>(&svgd_bandwidth))
    require(f->h > 0.0, "fixed SVGD bandwidth must be positive");
}

KernelValue rbf_kernel_and_grad(std::span<const double> x, std::span<const double> y, double h) {
  require(h > 0.0, "kernel bandwidth must be positive");
  require(x.size() == y.size(), "kernel arguments differ in dimension");
  KernelValue out{std::exp(-squared_distance(x, y) / h), Vector(x.size())};
  const double c = -2.0 / h * out.k;
  for (std::size_t i = 0; i < x.size(); ++i) out.grad_x[i] = c * (x[i] - y[i]);
  return out;
}

double median_bandwidth(const ParticleSet& particles, double floor) {
  const std::size_t n = particles.count();
  if (n < 2) return floor;
  std::vector<double> dist;
  dist.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      dist.push_back(std::sqrt(squared_distance(particles.row(i), particles.row(j))));
  const auto mid = dist.begin() + static_cast<std::ptrdiff_t>((dist.size() - 1) / 2);
  std::nth_element(dist.begin(), mid, dist.end());
  const double med2 = *mid * *mid;
  const double h = med2 / std::log(static_cast<double>(n));
  if (h < floor) return std::max(floor, med2);
  return h;
}

double resolve_bandwidth(const ParticleSet& particles, const KernelConfig& cfg) {
  if (const auto* f = std::get_if<FixedBandwidth>(&cfg.svgd_bandwidth)) return f->h;
  return median_bandwidth(particles, cfg.bandwidth_floor);
}

namespace {

// Exponents -|x - s_n|^2 / lambda and their maximum.
double kde_exponents(std::span<const double> x, const ParticleSet& support, double lambda,
                     std::vector<double>& e) {
  require(support.count() >= 1, "KDE support is empty");
  require(lambda > 0.0, "KDE bandwidth must be positive");
  require(x.size() == support.dim(), "KDE point dimension mismatch");
  e.resize(support.count());
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 0; n < support.count(); ++n) {
    e[n] = -squared_distance(x, support.row(n)) / lambda;
    m = std::max(m, e[n]);
  }
  return m;
}

}  // namespace

Vector kde_log_density_grad(std::span<const double> x, const ParticleSet& support, double lambda) {
  std::vector<double> e;
  const double m = kde_exponents(x, support, lambda, e);
  double z = 0.0;
  for (double& v : e) {
    v = std::exp(v - m);
    z += v;
  }
  Vector g(x.size(), 0.0);
  for (std::size_t n = 0; n < support.count(); ++n) {
    const double w = e[n] / z;
    const auto s = support.row(n);
    for (std::size_t i = 0; i < x.size(); ++i) g[i] += w * (s[i] - x[i]);
  }
  const double c = 2.0 / lambda;
  for (double& v : g) v *= c;
  return g;
}

double kde_log_density(std::span<const double> x, const ParticleSet& support, double lambda) {
  std::vector<double> e;
  const double m = kde_exponents(x, support, lambda, e);
  double z = 0.0;
  for (double v : e) z += std::exp(v - m);
  return m + std::log(z / static_cast<double>(support.count()));
}

}  // namespace cpfl::svgd
