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

#include "cpfl/core/particles.hpp"
#include "cpfl/svgd/adagrad.hpp"
#include "cpfl/svgd/kernels.hpp"
#include "cpfl/svgd/tilted.hpp"

namespace cpfl::svgd {

// Stein direction phi(theta_n) = (1/N) sum_j [k(theta_j, theta_n) score(theta_j)
// + grad_{theta_j} k(theta_j, theta_n)] for every particle, evaluated on the
// pre-step particle values. Parallel over particles; the reduction order per
// particle is fixed so the result does not depend on the thread count.
Matrix stein_direction(const ParticleSet& particles, const ScoreFn& score, double h);

// One synchronous SVGD step with AdaGrad rates. Throws NumericalError naming
// the particle if phi is not finite.
ParticleSet svgd_step(const ParticleSet& particles, const ScoreFn& score,
                      const KernelConfig& kernels, AdaGradState& ada);

}  // namespace cpfl::svgd
