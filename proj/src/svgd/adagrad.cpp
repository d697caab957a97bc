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

#include "cpfl/svgd/adagrad.hpp"

#include <cmath>

#include "cpfl/core/error.hpp"

namespace cpfl::svgd {

void AdaGradState::validate() const {
  require(base_rate > 0.0, "AdaGrad base rate must be positive");
  require(fudge > 0.0, "AdaGrad fudge must be positive");
}

void adagrad_apply(Matrix& params, const Matrix& direction, AdaGradState& state) {
  require(params.rows() == direction.rows() && params.cols() == direction.cols(),
          "AdaGrad direction shape mismatch");
  if (state.accumulated.empty()) state.accumulated = Matrix(params.rows(), params.cols());
  require(state.accumulated.rows() == params.rows() && state.accumulated.cols() == params.cols(),
          "AdaGrad state shape mismatch");
  auto x = params.flat();
  auto g = direction.flat();
  auto acc = state.accumulated.flat();
  for (std::size_t i = 0; i < x.size(); ++i) {
    acc[i] += g[i] * g[i];
    x[i] += state.base_rate / (state.fudge + std::sqrt(acc[i])) * g[i];
  }
}

}  // namespace cpfl::svgd
