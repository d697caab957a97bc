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

#include "cpfl/codec/position_code.hpp"

#include "cpfl/core/error.hpp"

namespace cpfl::codec {

namespace {

void check_subset(std::span<const std::size_t> subset, std::size_t d) {
  for (std::size_t i = 0; i < subset.size(); ++i) {
    require(subset[i] < d, "subset index out of range");
    require(i == 0 || subset[i - 1] < subset[i], "subset must be strictly increasing");
  }
}

}  // namespace

BigInt subset_rank(std::span<const std::size_t> subset, std::size_t d) {
  check_subset(subset, d);
  BigInt r = 0;
  for (std::size_t i = 0; i < subset.size(); ++i) r += binomial(subset[i], i + 1);
  return r;
}

IndexSet subset_unrank(BigInt rank, std::size_t d, std::size_t k) {
  require(k <= d, "k must not exceed d");
  if (rank < 0 || rank >= binomial(d, k)) throw DecodeError("subset rank out of range");
  IndexSet out(k);
  std::size_t hi = d;  // elements are strictly below hi
  for (std::size_t i = k; i-- > 0;) {
    // Largest c < hi with C(c, i + 1) <= rank; c >= i always qualifies.
    std::size_t c = hi - 1;
    BigInt b = binomial(c, i + 1);
    while (b > rank) {
      // C(c - 1, m) = C(c, m) * (c - m) / c
      b = b * (c - (i + 1)) / c;
      --c;
    }
    out[i] = c;
    rank -= b;
    hi = c;
  }
  return out;
}

void encode_positions(std::span<const std::size_t> subset, std::size_t d, BitWriter& out) {
  out.write_big(subset_rank(subset, d), position_code_bits(d, subset.size()));
}

IndexSet decode_positions(BitReader& in, std::size_t d, std::size_t k) {
  if (k > d) throw DecodeError("k exceeds d");
  return subset_unrank(in.read_big(position_code_bits(d, k)), d, k);
}

Bits encode_positions(std::span<const std::size_t> subset, std::size_t d) {
  BitWriter w;
  encode_positions(subset, d, w);
  return {w.bytes(), w.bit_size()};
}

IndexSet decode_positions(const Bits& bits, std::size_t d, std::size_t k) {
  if (k > d) throw DecodeError("k exceeds d");
  if (bits.size != position_code_bits(d, k)) throw DecodeError("position code has wrong length");
  BitReader r(bits.bytes, bits.size);
  return decode_positions(r, d, k);
}

}  // namespace cpfl::codec
