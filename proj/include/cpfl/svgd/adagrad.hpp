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

#include "cpfl/core/matrix.hpp"

namespace cpfl::svgd {

// Per-coordinate AdaGrad: acc += g^2, x += base_rate / (fudge + sqrt(acc)) * g.
struct AdaGradState {
  double base_rate = 0.1;
  double fudge = 1e-8;
  Matrix accumulated;  // sized lazily on first use

  void validate() const;
};

// Applies one ascent step along `direction` in place.
void adagrad_apply(Matrix& params, const Matrix& direction, AdaGradState& state);

}  // namespace cpfl::svgd
