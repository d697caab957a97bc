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

#include <boost/multiprecision/cpp_int.hpp>

#include "cpfl/codec/config.hpp"

namespace cpfl::codec {

using BigInt = boost::multiprecision::cpp_int;

BigInt binomial(std::size_t n, std::size_t k);

// log2 of an exact positive integer, accurate to double precision.
double log2_exact(const BigInt& x);

// log2 C(d, k) from the exact binomial.
double position_bits(std::size_t d, std::size_t k);

// ceil(log2 C(d, k)): the length of the fixed-width subset rank.
std::size_t position_code_bits(std::size_t d, std::size_t k);

enum class Accounting {
  kAnalytic,  // groups * log2 C(d,k) + N_p * N_b * k
  kRealized,  // groups * ceil(log2 C(d,k)) + N_p * N_b * k + scale headers
};

double bits_for_k(const CompressionConfig& cfg, std::size_t num_particles, std::size_t dim,
                  std::size_t k, Accounting mode = Accounting::kAnalytic);

// Requires cfg.ratio; evaluates the analytic per-iteration bit formula.
double bits_per_iteration(const CompressionConfig& cfg, std::size_t num_particles,
                          std::size_t dim);

// Largest k in [1, d] whose cost is within the budget. Throws ConfigError
// reporting the cheapest achievable cost when no k fits.
std::size_t solve_ratio(double budget, const CompressionConfig& cfg, std::size_t num_particles,
                        std::size_t dim, Accounting mode = Accounting::kRealized);

// k from cfg.ratio (r * d must be integral) or from cfg.bit_budget.
std::size_t resolve_k(const CompressionConfig& cfg, std::size_t num_particles, std::size_t dim);

}  // namespace cpfl::codec
