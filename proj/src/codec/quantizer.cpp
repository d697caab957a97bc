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

#include "cpfl/codec/quantizer.hpp"

#include <algorithm>
#include <cmath>

#include "cpfl/core/error.hpp"

namespace cpfl::codec {

void QuantizerSpec::validate() const {
  require(bits >= 2 && bits <= 32, "quantizer needs 2..32 bits per entry");
  require(a_max > 0.0 && std::isfinite(a_max), "quantizer range must be positive");
}

double QuantizerSpec::level_value(std::uint32_t level) const {
  if (level >= max_level()) return a_max;
  return static_cast<double>(level) * step();
}

double dequantize(std::uint32_t level, bool negative, const QuantizerSpec& spec) {
  const double m = spec.level_value(level);
  return negative ? -m : m;
}

QuantizedValue stochastic_quantize(double x, const QuantizerSpec& spec, SeededRng& rng) {
  const bool negative = x < 0.0;
  const double a = std::min(std::abs(x), spec.a_max);
  const std::uint32_t top = spec.max_level();
  std::uint32_t level;
  if (a >= spec.a_max) {
    level = top;
  } else {
    const double delta = spec.step();
    auto t = static_cast<std::uint32_t>(std::min<double>(std::floor(a / delta), top));
    // Keep t * delta <= a < (t + 1) * delta despite rounding in a / delta.
    while (t > 0 && spec.level_value(t) > a) --t;
    while (t < top && spec.level_value(t + 1) <= a) ++t;
    level = t;
    if (t < top) {
      const double lo = spec.level_value(t);
      const double hi = spec.level_value(t + 1);
      const double p_up = std::clamp((a - lo) / (hi - lo), 0.0, 1.0);
      if (rng.uniform() < p_up) level = t + 1;
    }
  }
  return {level, negative, dequantize(level, negative, spec)};
}

}  // namespace cpfl::codec
