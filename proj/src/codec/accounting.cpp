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

#include "cpfl/codec/accounting.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "cpfl/core/error.hpp"

namespace cpfl::codec {

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  if (k > n - k) k = n - k;
  BigInt c = 1;
  for (std::size_t i = 0; i < k; ++i) {
    c *= n - i;
    c /= i + 1;
  }
  return c;
}

double log2_exact(const BigInt& x) {
  require(x > 0, "log2 of a non-positive integer");
  const std::size_t top = boost::multiprecision::msb(x);
  if (top < 53) return std::log2(x.convert_to<double>());
  const std::size_t shift = top - 52;
  const BigInt mant = x >> shift;
  // mant holds the 53 leading bits; the dropped tail is below double precision.
  return std::log2(mant.convert_to<double>()) + static_cast<double>(shift);
}

double position_bits(std::size_t d, std::size_t k) {
  require(k <= d, "k must not exceed d");
  return log2_exact(binomial(d, k));
}

namespace {

std::size_t ceil_log2(const BigInt& c) {
  if (c <= 1) return 0;
  return boost::multiprecision::msb(BigInt(c - 1)) + 1;
}

double cost(const CompressionConfig& cfg, std::size_t np, std::size_t k, std::size_t groups,
            const BigInt& c, Accounting mode) {
  const double entries = static_cast<double>(np * cfg.bits_per_entry * k);
  if (mode == Accounting::kAnalytic) return static_cast<double>(groups) * log2_exact(c) + entries;
  const double headers =
      std::holds_alternative<PerMessageScale>(cfg.scale) ? double(kScaleHeaderBits) : 0.0;
  return static_cast<double>(groups * ceil_log2(c)) + entries + headers;
}

}  // namespace

std::size_t position_code_bits(std::size_t d, std::size_t k) {
  require(k <= d, "k must not exceed d");
  return ceil_log2(binomial(d, k));
}

double bits_for_k(const CompressionConfig& cfg, std::size_t num_particles, std::size_t dim,
                  std::size_t k, Accounting mode) {
  require(k <= dim, "k must not exceed d");
  return cost(cfg, num_particles, k, group_count(cfg, num_particles), binomial(dim, k), mode);
}

double bits_per_iteration(const CompressionConfig& cfg, std::size_t num_particles,
                          std::size_t dim) {
  require(cfg.ratio.has_value(), "bits_per_iteration needs a sparsification ratio");
  validate(cfg, num_particles, dim);
  return bits_for_k(cfg, num_particles, dim, resolve_k(cfg, num_particles, dim));
}

std::size_t solve_ratio(double budget, const CompressionConfig& cfg, std::size_t num_particles,
                        std::size_t dim, Accounting mode) {
  if (!(budget > 0.0)) throw ConfigError("bit budget must be positive");
  const std::size_t groups = group_count(cfg, num_particles);
  std::size_t best = 0;
  double cheapest = std::numeric_limits<double>::infinity();
  BigInt c = 1;  // C(dim, k), updated incrementally
  for (std::size_t k = 1; k <= dim; ++k) {
    c *= dim - k + 1;
    c /= k;
    const double bits = cost(cfg, num_particles, k, groups, c, mode);
    cheapest = std::min(cheapest, bits);
    if (bits <= budget) best = k;
  }
  if (best == 0) {
    std::ostringstream os;
    os << "bit budget " << budget << " is infeasible for N_p = " << num_particles
       << ", d = " << dim << ", N_b = " << cfg.bits_per_entry << "; cheapest message costs "
       << cheapest << " bits";
    throw ConfigError(os.str());
  }
  return best;
}

std::size_t resolve_k(const CompressionConfig& cfg, std::size_t num_particles, std::size_t dim) {
  validate(cfg, num_particles, dim);
  if (cfg.bit_budget) return solve_ratio(*cfg.bit_budget, cfg, num_particles, dim);
  const double kd = *cfg.ratio * static_cast<double>(dim);
  const double k = std::round(kd);
  if (std::abs(kd - k) > 1e-9 * std::max(1.0, kd) || k < 1.0)
    throw ConfigError("ratio * d must be a positive integer");
  return static_cast<std::size_t>(k);
}

}  // namespace cpfl::codec
