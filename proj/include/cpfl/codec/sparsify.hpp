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
#include <vector>

#include "cpfl/codec/config.hpp"
#include "cpfl/codec/position_code.hpp"
#include "cpfl/core/matrix.hpp"

namespace cpfl::codec {

// One sorted k-index set per group; group g covers rows
// [g * rows_per_group, (g + 1) * rows_per_group).
struct SparsityPattern {
  std::vector<IndexSet> groups;
  std::size_t rows_per_group = 1;

  const IndexSet& for_row(std::size_t row) const { return groups[row / rows_per_group]; }
  friend bool operator==(const SparsityPattern&, const SparsityPattern&) = default;
};

// Indices of the k largest scores, ties to the lower index, returned sorted.
IndexSet top_k(std::span<const double> scores, std::size_t k);

SparsityPattern sparsify_per_particle(const Matrix& delta, std::size_t k);
SparsityPattern sparsify_shared(const Matrix& delta, std::size_t k);
// Contiguous blocks of alpha_s * N_p rows share one pattern.
SparsityPattern sparsify_alpha_shared(const Matrix& delta, std::size_t k, Rational share);

SparsityPattern sparsify(const Matrix& delta, std::size_t k, const CompressionConfig& cfg);

}  // namespace cpfl::codec
