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
#include <cstdint>
#include <vector>

#include "cpfl/codec/accounting.hpp"
#include "cpfl/codec/config.hpp"
#include "cpfl/codec/quantizer.hpp"
#include "cpfl/codec/sparsify.hpp"
#include "cpfl/core/matrix.hpp"
#include "cpfl/core/rng.hpp"

namespace cpfl::codec {

struct EntryCode {
  bool negative = false;
  std::uint32_t level = 0;
  friend bool operator==(const EntryCode&, const EntryCode&) = default;
};

struct CompressedDelta {
  std::size_t num_particles = 0;
  std::size_t dim = 0;
  Scheme scheme = Scheme::kPerParticle;
  Rational share;
  std::size_t k = 0;
  std::size_t bits_per_entry = 2;
  bool per_message_scale = true;
  double a_max = 0.0;
  SparsityPattern pattern;
  std::vector<std::vector<EntryCode>> codes;  // per particle, in pattern order
  std::size_t bit_count = 0;                  // positions + entries + scale header
  double analytic_bits = 0.0;                 // the un-ceiled formula, no headers

  friend bool operator==(const CompressedDelta&, const CompressedDelta&) = default;
};

// Sparsify then stochastically quantize. Quantization of row n draws from a
// substream derived from one value taken from `rng` and n.
CompressedDelta encode_delta(const Matrix& delta, const CompressionConfig& cfg, SeededRng& rng);
CompressedDelta encode_delta(const Matrix& delta, const CompressionConfig& cfg, std::size_t k,
                             SeededRng& rng);

Matrix decode_delta(const CompressedDelta& cd);

// Length-prefixed bitstream: u32 bit length, then framing header
// (N_p, d, scheme, alpha num/den, k, N_b, scale policy, fixed a_max), then the
// payload (float32 a_max under the per-message policy, per-group position
// codes, per-particle sign/magnitude codes). Most-significant bit first.
struct Bitstream {
  std::vector<std::uint8_t> bytes;
  std::size_t total_bits = 0;
  std::size_t payload_bits = 0;  // equals CompressedDelta::bit_count
};

Bitstream serialize(const CompressedDelta& cd);
CompressedDelta deserialize(const std::vector<std::uint8_t>& bytes);

}  // namespace cpfl::codec
