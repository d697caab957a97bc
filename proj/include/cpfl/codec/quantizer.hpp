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

#include "cpfl/core/rng.hpp"

namespace cpfl::codec {

// Sign-magnitude grid with 2^(N_b - 1) magnitude levels 0, delta, ..., a_max.
struct QuantizerSpec {
  std::size_t bits = 5;  // N_b
  double a_max = 1.0;

  void validate() const;
  std::uint32_t max_level() const { return (std::uint32_t{1} << (bits - 1)) - 1; }
  double step() const { return a_max / static_cast<double>(max_level()); }
  // Magnitude of a level; the top level is a_max exactly.
  double level_value(std::uint32_t level) const;
};

struct QuantizedValue {
  std::uint32_t level = 0;
  bool negative = false;
  double value = 0.0;  // sign * level_value(level)
};

// Clips |x| to a_max, then rounds to one of the two neighbouring levels with
// probabilities that make the result unbiased.
QuantizedValue stochastic_quantize(double x, const QuantizerSpec& spec, SeededRng& rng);

double dequantize(std::uint32_t level, bool negative, const QuantizerSpec& spec);

}  // namespace cpfl::codec
