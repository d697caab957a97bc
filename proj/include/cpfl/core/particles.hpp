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

#include <cstddef>

#include "cpfl/core/error.hpp"
#include "cpfl/core/matrix.hpp"

namespace cpfl {

// N_p particles x d parameters; each row is one particle.
class ParticleSet : public Matrix {
 public:
  ParticleSet() = default;
  ParticleSet(std::size_t count, std::size_t dim, double fill = 0.0)
      : Matrix(count, dim, fill) {
    require(count >= 1, "particle set needs at least one particle");
  }
  explicit ParticleSet(Matrix m) : Matrix(std::move(m)) {
    require(rows() >= 1, "particle set needs at least one particle");
  }

  std::size_t count() const { return rows(); }
  std::size_t dim() const { return cols(); }
};

}  // namespace cpfl
