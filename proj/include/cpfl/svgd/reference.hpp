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

#include "cpfl/svgd/svgd.hpp"

// Straightforward single-threaded SVGD kept as the test oracle for the
// parallel kernels in svgd.hpp.
namespace cpfl::svgd::reference {

Matrix stein_direction(const ParticleSet& particles, const ScoreFn& score, double h);

ParticleSet svgd_step(const ParticleSet& particles, const ScoreFn& score,
                      const KernelConfig& kernels, AdaGradState& ada);

}  // namespace cpfl::svgd::reference
