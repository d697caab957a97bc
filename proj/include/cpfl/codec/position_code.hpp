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
#include <span>
#include <vector>

#include "cpfl/codec/accounting.hpp"
#include "cpfl/codec/bitstream.hpp"

namespace cpfl::codec {

using IndexSet = std::vector<std::size_t>;

// Colex rank of a sorted k-subset of [0, d): sum_i C(c_i, i + 1).
BigInt subset_rank(std::span<const std::size_t> subset, std::size_t d);
IndexSet subset_unrank(BigInt rank, std::size_t d, std::size_t k);

// Fixed-width code of position_code_bits(d, k) bits.
void encode_positions(std::span<const std::size_t> subset, std::size_t d, BitWriter& out);
IndexSet decode_positions(BitReader& in, std::size_t d, std::size_t k);

// Standalone bitstring forms.
struct Bits {
  std::vector<std::uint8_t> bytes;
  std::size_t size = 0;
};
Bits encode_positions(std::span<const std::size_t> subset, std::size_t d);
IndexSet decode_positions(const Bits& bits, std::size_t d, std::size_t k);

}  // namespace cpfl::codec
