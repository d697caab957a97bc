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

#include "cpfl/svgd/reference.hpp"

#include <cmath>
#include <string>

#include "cpfl/core/error.hpp"

namespace cpfl::svgd::reference {

Matrix stein_direction(const ParticleSet& particles, const ScoreFn& score, double h) {
  const std::size_t n = particles.count();
  const std::size_t d = particles.dim();
  std::vector<Vector> scores;
  scores.reserve(n);
  for (std::size_t j = 0; j < n; ++j) scores.push_back(score(particles.row(j)));

  Matrix phi(n, d);
  for (std::size_t t = 0; t < n; ++t) {
    auto out = phi.row(t);
    for (std::size_t j = 0; j < n; ++j) {
      const KernelValue kv = rbf_kernel_and_grad(particles.row(j), particles.row(t), h);
      for (std::size_t i = 0; i < d; ++i) out[i] += kv.k * scores[j][i] + kv.grad_x[i];
    }
    for (double& v : out) v *= 1.0 / static_cast<double>(n);
  }
  return phi;
}

ParticleSet svgd_step(const ParticleSet& particles, const ScoreFn& score,
                      const KernelConfig& kernels, AdaGradState& ada) {
  const double h = resolve_bandwidth(particles, kernels);
  const Matrix phi = stein_direction(particles, score, h);
  for (std::size_t t = 0; t < phi.rows(); ++t)
    for (double v : phi.row(t))
      if (!std::isfinite(v))
        throw NumericalError("non-finite SVGD direction at particle " + std::to_string(t));
  ParticleSet next = particles;
  adagrad_apply(next, phi, ada);
  return next;
}

}  // namespace cpfl::svgd::reference
