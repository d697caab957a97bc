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

#include "cpfl/codec/config.hpp"

#include <cmath>
#include <numeric>

#include "cpfl/core/error.hpp"

namespace cpfl::codec {

Rational Rational::make(std::uint32_t num, std::uint32_t den) {
  if (num == 0 || den == 0) throw ConfigError("fraction must be positive");
  const std::uint32_t g = std::gcd(num, den);
  return {num / g, den / g};
}

Rational Rational::parse(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash != std::string::npos) {
      const auto n = std::stoul(text.substr(0, slash));
      const auto d = std::stoul(text.substr(slash + 1));
      return make(static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(d));
    }
    const double v = std::stod(text);
    if (!(v > 0.0)) throw ConfigError("fraction must be positive: " + text);
    // Decimals are accepted only when they are reciprocals of integers or 1.
    const double inv = 1.0 / v;
    const double r = std::round(inv);
    if (std::abs(inv - r) > 1e-9 || r < 1.0)
      throw ConfigError("fraction '" + text + "' is not of the form 1/m; write it as a/b");
    return make(1, static_cast<std::uint32_t>(r));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::logic_error&) {
    throw ConfigError("cannot parse fraction '" + text + "'");
  }
}

std::string Rational::str() const { return std::to_string(num) + "/" + std::to_string(den); }

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::kPerParticle: return "per-particle";
    case Scheme::kShared: return "shared";
    case Scheme::kAlphaShared: return "alpha-shared";
  }
  return "?";
}

Scheme parse_scheme(const std::string& name) {
  if (name == "per-particle") return Scheme::kPerParticle;
  if (name == "shared") return Scheme::kShared;
  if (name == "alpha-shared") return Scheme::kAlphaShared;
  throw ConfigError("unknown sparsification scheme '" + name + "'");
}

std::size_t group_count(const CompressionConfig& cfg, std::size_t num_particles) {
  switch (cfg.scheme) {
    case Scheme::kPerParticle: return num_particles;
    case Scheme::kShared: return 1;
    case Scheme::kAlphaShared: return cfg.share.den / cfg.share.num;
  }
  return 1;
}

void validate_scheme(const CompressionConfig& cfg, std::size_t num_particles, std::size_t dim) {
  if (num_particles < 1) throw ConfigError("need at least one particle");
  if (dim < 1) throw ConfigError("dimension must be positive");
  if (cfg.bits_per_entry < 2 || cfg.bits_per_entry > 32)
    throw ConfigError("bits_per_entry must be in [2, 32]");
  if (const auto* f = std::get_if<FixedScale>(&cfg.scale); f && !(f->a_max > 0.0))
    throw ConfigError("fixed a_max must be positive");
  if (cfg.scheme == Scheme::kAlphaShared) {
    const auto& a = cfg.share;
    if (a.num == 0 || a.den % a.num != 0)
      throw ConfigError("share fraction " + a.str() + ": 1/alpha_s must be an integer");
    const std::size_t groups = a.den / a.num;
    if (groups > num_particles || num_particles % groups != 0)
      throw ConfigError("share fraction " + a.str() + ": 1/alpha_s must divide N_p = " +
                        std::to_string(num_particles));
  }
}

void validate(const CompressionConfig& cfg, std::size_t num_particles, std::size_t dim) {
  validate_scheme(cfg, num_particles, dim);
  if (cfg.ratio.has_value() == cfg.bit_budget.has_value())
    throw ConfigError("exactly one of ratio and bit_budget must be set");
  if (cfg.ratio && !(*cfg.ratio > 0.0 && *cfg.ratio <= 1.0))
    throw ConfigError("ratio must lie in (0, 1]");
  if (cfg.bit_budget && !(*cfg.bit_budget > 0.0)) throw ConfigError("bit_budget must be positive");
}

}  // namespace cpfl::codec
