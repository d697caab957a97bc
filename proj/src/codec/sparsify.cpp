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

#include "cpfl/codec/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cpfl/core/error.hpp"

namespace cpfl::codec {

IndexSet top_k(std::span<const double> scores, std::size_t k) {
  require(k >= 1 && k <= scores.size(), "k must lie in [1, d]");
  IndexSet idx(scores.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const auto mid = idx.begin() + static_cast<std::ptrdiff_t>(k);
  std::partial_sort(idx.begin(), mid, idx.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b] || (scores[a] == scores[b] && a < b);
  });
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

namespace {

SparsityPattern grouped(const Matrix& delta, std::size_t k, std::size_t rows_per_group) {
  require(k >= 1 && k <= delta.cols(), "k must lie in [1, d]");
  require(rows_per_group >= 1 && delta.rows() % rows_per_group == 0,
          "group size must divide the particle count");
  SparsityPattern p;
  p.rows_per_group = rows_per_group;
  const std::size_t groups = delta.rows() / rows_per_group;
  p.groups.reserve(groups);
  Vector sums(delta.cols());
  for (std::size_t g = 0; g < groups; ++g) {
    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t r = g * rows_per_group; r < (g + 1) * rows_per_group; ++r) {
      const auto row = delta.row(r);
      for (std::size_t j = 0; j < row.size(); ++j) sums[j] += std::abs(row[j]);
    }
    p.groups.push_back(top_k(sums, k));
  }
  return p;
}

}  // namespace

SparsityPattern sparsify_per_particle(const Matrix& delta, std::size_t k) {
  return grouped(delta, k, 1);
}

SparsityPattern sparsify_shared(const Matrix& delta, std::size_t k) {
  require(delta.rows() >= 1, "delta has no rows");
  return grouped(delta, k, delta.rows());
}

SparsityPattern sparsify_alpha_shared(const Matrix& delta, std::size_t k, Rational share) {
  if (share.num == 0 || share.den % share.num != 0)
    throw InvalidInput("share fraction " + share.str() + " is not 1/m");
  const std::size_t groups = share.den / share.num;
  if (groups > delta.rows() || delta.rows() % groups != 0)
    throw InvalidInput("share fraction " + share.str() + " does not divide the particle count");
  return grouped(delta, k, delta.rows() / groups);
}

SparsityPattern sparsify(const Matrix& delta, std::size_t k, const CompressionConfig& cfg) {
  switch (cfg.scheme) {
    case Scheme::kPerParticle: return sparsify_per_particle(delta, k);
    case Scheme::kShared: return sparsify_shared(delta, k);
    case Scheme::kAlphaShared: return sparsify_alpha_shared(delta, k, cfg.share);
  }
  throw InvalidInput("unknown scheme");
}

}  // namespace cpfl::codec
