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
#include <span>
#include <stdexcept>
#include <vector>

#include "cpfl/codec/accounting.hpp"

namespace cpfl::codec {

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// MSB-first bit packer.
class BitWriter {
 public:
  void write(std::uint64_t value, std::size_t nbits);
  void write_big(const BigInt& value, std::size_t nbits);
  void write_bit(bool b);

  std::size_t bit_size() const { return bits_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::size_t bits_ = 0;
};

class BitReader {
 public:
  explicit BitReader(std::span<const std::uint8_t> bytes, std::size_t bit_limit);
  explicit BitReader(std::span<const std::uint8_t> bytes)
      : BitReader(bytes, bytes.size() * 8) {}

  bool read_bit();
  std::uint64_t read(std::size_t nbits);
  BigInt read_big(std::size_t nbits);

  std::size_t position() const { return pos_; }
  std::size_t remaining() const { return limit_ - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t limit_;
  std::size_t pos_ = 0;
};

}  // namespace cpfl::codec
