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
#include <optional>
#include <string>
#include <variant>

namespace cpfl::codec {

// Positive fraction num/den kept in lowest terms.
struct Rational {
  std::uint32_t num = 1;
  std::uint32_t den = 1;

  static Rational make(std::uint32_t num, std::uint32_t den);
  // Accepts "a/b" or a decimal such as "0.5".
  static Rational parse(const std::string& text);

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;

  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class Scheme : std::uint8_t { kPerParticle = 0, kShared = 1, kAlphaShared = 2 };

const char* scheme_name(Scheme s);
Scheme parse_scheme(const std::string& name);

struct FixedScale {
  double a_max = 1.0;
  friend bool operator==(const FixedScale&, const FixedScale&) = default;
};
// a_max = max |retained entry|, shipped as a float32 header.
struct PerMessageScale {
  friend bool operator==(const PerMessageScale&, const PerMessageScale&) = default;
};
using ScalePolicy = std::variant<FixedScale, PerMessageScale>;

inline constexpr std::size_t kScaleHeaderBits = 32;

// Exactly one of `ratio` (r = k / d) or `bit_budget` (R_u) drives k.
struct CompressionConfig {
  Scheme scheme = Scheme::kAlphaShared;
  Rational share = {1, 1};  // alpha_s, used by kAlphaShared
  std::optional<double> ratio;
  std::optional<double> bit_budget;
  std::size_t bits_per_entry = 5;  // N_b: one sign bit plus N_b - 1 magnitude bits
  ScalePolicy scale = PerMessageScale{};

  friend bool operator==(const CompressionConfig&, const CompressionConfig&) = default;
};

// Number of sparsity groups (1 / alpha_s) for N_p particles.
std::size_t group_count(const CompressionConfig& cfg, std::size_t num_particles);

// Checks scheme admissibility for N_p particles of dimension d; throws ConfigError.
void validate_scheme(const CompressionConfig& cfg, std::size_t num_particles, std::size_t dim);
// validate_scheme plus exactly one of ratio / bit_budget.
void validate(const CompressionConfig& cfg, std::size_t num_particles, std::size_t dim);

}  // namespace cpfl::codec
