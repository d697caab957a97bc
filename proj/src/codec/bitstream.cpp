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

#include "cpfl/codec/bitstream.hpp"

namespace cpfl::codec {

void BitWriter::write_bit(bool b) {
  if (bits_ % 8 == 0) bytes_.push_back(0);
  if (b) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ % 8));
  ++bits_;
}

void BitWriter::write(std::uint64_t value, std::size_t nbits) {
  for (std::size_t i = nbits; i-- > 0;) write_bit((value >> i) & 1u);
}

void BitWriter::write_big(const BigInt& value, std::size_t nbits) {
  for (std::size_t i = nbits; i-- > 0;) write_bit(boost::multiprecision::bit_test(value, i));
}

BitReader::BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_limit)
    : bytes_(bytes), limit_(bit_limit) {
  if (bit_limit > bytes.size() * 8) throw DecodeError("bit limit exceeds buffer");
}

bool BitReader::read_bit() {
  if (pos_ >= limit_) throw DecodeError("bitstream truncated");
  const bool b = (bytes_[pos_ / 8] >> (7 - pos_ % 8)) & 1u;
  ++pos_;
  return b;
}

std::uint64_t BitReader::read(std::size_t nbits) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < nbits; ++i) v = (v << 1) | (read_bit() ? 1u : 0u);
  return v;
}

BigInt BitReader::read_big(std::size_t nbits) {
  BigInt v = 0;
  for (std::size_t i = 0; i < nbits; ++i) {
    v <<= 1;
    if (read_bit()) v |= 1;
  }
  return v;
}

}  // namespace cpfl::codec
