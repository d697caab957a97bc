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

#include "cpfl/svgd/svgd.hpp"

#include <cmath>
#include <string>

#include "cpfl/core/error.hpp"

namespace cpfl::svgd {

namespace {

Matrix evaluate_scores(const ParticleSet& particles, const ScoreFn& score) {
  const std::size_t n = particles.count();
  Matrix s(n, particles.dim());
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(n); ++j) {
    const auto row = static_cast<std::size_t>(j);
    const Vector v = score(particles.row(row));
    auto dst = s.row(row);
    for (std::size_t i = 0; i < dst.size() && i < v.size(); ++i) dst[i] = v[i];
  }
  return s;
}

Matrix kernel_matrix(const ParticleSet& particles, double h) {
  const std::size_t n = particles.count();
  Matrix k(n, n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(n); ++a) {
    const auto i = static_cast<std::size_t>(a);
    k(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::exp(-squared_distance(particles.row(j), particles.row(i)) / h);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

void check_finite(const Matrix& phi) {
  for (std::size_t n = 0; n < phi.rows(); ++n)
    for (double v : phi.row(n))
      if (!std::isfinite(v))
        throw NumericalError("non-finite SVGD direction at particle " + std::to_string(n));
}

}  // namespace

Matrix stein_direction(const ParticleSet& particles, const ScoreFn& score, double h) {
  require(h > 0.0, "kernel bandwidth must be positive");
  const std::size_t n = particles.count();
  const std::size_t d = particles.dim();
  const Matrix s = evaluate_scores(particles, score);
  const Matrix k = kernel_matrix(particles, h);
  const double inv_n = 1.0 / static_cast<double>(n);

  Matrix phi(n, d);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t a = 0; a < static_cast<std::ptrdiff_t>(n); ++a) {
    const auto target = static_cast<std::size_t>(a);
    const auto x = particles.row(target);
    auto out = phi.row(target);
    for (std::size_t j = 0; j < n; ++j) {
      const double kv = k(j, target);
      const double c = -2.0 / h * kv;
      const auto y = particles.row(j);
      const auto sj = s.row(j);
      for (std::size_t i = 0; i < d; ++i) out[i] += kv * sj[i] + c * (y[i] - x[i]);
    }
    for (double& v : out) v *= inv_n;
  }
  return phi;
}

ParticleSet svgd_step(const ParticleSet& particles, const ScoreFn& score,
                      const KernelConfig& kernels, AdaGradState& ada) {
  require(particles.all_finite(), "particles contain non-finite values");
  const double h = resolve_bandwidth(particles, kernels);
  const Matrix phi = stein_direction(particles, score, h);
  check_finite(phi);
  ParticleSet next = particles;
  adagrad_apply(next, phi, ada);
  return next;
}

}  // namespace cpfl::svgd
