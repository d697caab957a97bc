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

#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "cpfl/codec/accounting.hpp"
#include "cpfl/codec/bitstream.hpp"
#include "cpfl/codec/codec.hpp"
#include "cpfl/codec/config.hpp"
#include "cpfl/codec/position_code.hpp"
#include "cpfl/codec/quantizer.hpp"
#include "cpfl/codec/sparsify.hpp"
#include "cpfl/core/error.hpp"
#include "cpfl/core/rng.hpp"
#include "oracles.hpp"

using namespace cpfl;
using namespace cpfl::codec;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> values) {
  Matrix m(values.size(), values.begin()->size());
  std::size_t r = 0;
  for (const auto& row : values) {
    std::copy(row.begin(), row.end(), m.row(r).begin());
    ++r;
  }
  return m;
}

Matrix random_matrix(SeededRng& rng, std::size_t n, std::size_t d) {
  Matrix m(n, d);
  for (double& v : m.flat()) v = rng.normal();
  return m;
}

CompressionConfig make_cfg(Scheme s, std::optional<double> ratio, std::size_t nb = 5,
                           Rational share = {1, 1}) {
  CompressionConfig c;
  c.scheme = s;
  c.share = share;
  c.ratio = ratio;
  c.bits_per_entry = nb;
  return c;
}

}  // namespace

TEST_CASE("top-k sparsity patterns") {
  const Matrix delta = rows({{1.0, -2.0, 0.5}, {0.5, 1.0, -3.0}});
  const auto per = sparsify_per_particle(delta, 1);
  CHECK(per.groups == std::vector<IndexSet>{{1}, {2}});
  const auto shared = sparsify_shared(delta, 2);
  CHECK(shared.groups == std::vector<IndexSet>{{1, 2}});
  CHECK(shared.for_row(1) == IndexSet{1, 2});
  const auto all = sparsify_per_particle(delta, 3);
  for (const auto& g : all.groups) CHECK(g == IndexSet{0, 1, 2});

  SUBCASE("ties go to the lower index") {
    CHECK(top_k(std::vector<double>{1.0, 3.0, 3.0, 3.0}, 2) == IndexSet{1, 2});
  }
  SUBCASE("one row: shared equals per-particle") {
    const Matrix one = rows({{0.1, -4.0, 2.0, 0.3}});
    CHECK(sparsify_shared(one, 2).groups == sparsify_per_particle(one, 2).groups);
  }
  SUBCASE("alpha-shared limits") {
    SeededRng rng(21);
    const Matrix m = random_matrix(rng, 6, 8);
    CHECK(sparsify_alpha_shared(m, 3, {1, 1}).groups == sparsify_shared(m, 3).groups);
    CHECK(sparsify_alpha_shared(m, 3, {1, 6}).groups == sparsify_per_particle(m, 3).groups);
  }
  SUBCASE("alpha = 1/2 on four rows gives two blocks of two") {
    const Matrix m = rows({{1, 0, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 2}, {0, 0, 3, 0}});
    const auto p = sparsify_alpha_shared(m, 1, {1, 2});
    CHECK(p.rows_per_group == 2);
    CHECK(p.groups == std::vector<IndexSet>{{0}, {2}});
    CHECK(p.for_row(1) == IndexSet{0});
  }
  CHECK_THROWS_AS(sparsify_per_particle(delta, 0), InvalidInput);
  CHECK_THROWS_AS(sparsify_per_particle(delta, 4), InvalidInput);
  CHECK_THROWS(sparsify_alpha_shared(random_matrix(*std::make_unique<SeededRng>(1), 10, 4), 1, {1, 3}));
}

TEST_CASE("position bits against the binomial oracle") {
  CHECK(position_bits(4, 2) == doctest::Approx(std::log2(6.0)).epsilon(1e-15));
  CHECK(position_bits(4, 0) == 0.0);
  CHECK(position_bits(4, 4) == 0.0);
  CHECK(position_bits(100, 10) == doctest::Approx(43.9767).epsilon(1e-6));
  for (std::size_t d = 1; d <= 400; d += 37)
    for (std::size_t k = 0; k <= d; k += 1 + d / 9)
      CHECK(std::abs(position_bits(d, k) - oracle::log2_binomial(d, k)) < 1e-9 * (1.0 + position_bits(d, k)));
  for (std::size_t d = 1; d <= 60; ++d)
    for (std::size_t k = 0; k <= d; ++k) {
      CHECK(binomial(d, k) == oracle::binomial_small(d, k));
      CHECK(position_code_bits(d, k) == oracle::ceil_log2(oracle::binomial_small(d, k)));
    }
}

TEST_CASE("subset ranking is a bijection onto [0, C(d, k))") {
  CHECK(subset_rank(IndexSet{0, 1}, 4) == 0);
  CHECK(subset_rank(IndexSet{2, 3}, 4) == 5);
  for (std::size_t d = 1; d <= 12; ++d)
    for (std::size_t k = 0; k <= d; ++k) {
      const auto total = oracle::binomial_small(d, k);
      std::vector<bool> seen(total, false);
      // Enumerate all k-subsets via bitmasks.
      for (std::uint32_t mask = 0; mask < (1u << d); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != k) continue;
        IndexSet s;
        for (std::size_t i = 0; i < d; ++i)
          if (mask & (1u << i)) s.push_back(i);
        const BigInt r = subset_rank(s, d);
        REQUIRE(r < total);
        const auto ri = static_cast<std::size_t>(r);
        CHECK_FALSE(seen[ri]);
        seen[ri] = true;
        CHECK(subset_unrank(r, d, k) == s);
        const Bits bits = encode_positions(s, d);
        CHECK(bits.size == position_code_bits(d, k));
        CHECK(decode_positions(bits, d, k) == s);
      }
    }
}

TEST_CASE("position codes reject malformed input") {
  CHECK_THROWS(subset_rank(IndexSet{2, 1}, 4));
  CHECK_THROWS(subset_rank(IndexSet{1, 4}, 4));
  CHECK_THROWS_AS(subset_unrank(BigInt(6), 4, 2), DecodeError);
  Bits bits = encode_positions(IndexSet{1, 3}, 4);
  bits.size -= 1;
  CHECK_THROWS_AS(decode_positions(bits, 4, 2), DecodeError);
  // Rank 7 is out of range for C(4, 2) = 6 in a 3-bit field.
  Bits over{{0xE0}, 3};
  CHECK_THROWS_AS(decode_positions(over, 4, 2), DecodeError);
}

TEST_CASE("bitstream round trip") {
  BitWriter w;
  w.write(5, 3);
  w.write_bit(true);
  w.write(0xABCDEF, 24);
  w.write_big(BigInt(1) << 70, 71);
  BitReader r(w.bytes(), w.bit_size());
  CHECK(r.read(3) == 5);
  CHECK(r.read_bit());
  CHECK(r.read(24) == 0xABCDEF);
  CHECK(r.read_big(71) == (BigInt(1) << 70));
  CHECK(r.remaining() == 0);
  CHECK_THROWS_AS(r.read_bit(), DecodeError);
  CHECK(w.bytes()[0] == 0xBA);  // 101 1 1010: MSB first
}

TEST_CASE("stochastic quantizer") {
  SeededRng rng(22);
  const QuantizerSpec q{2, 1.0};
  CHECK(q.max_level() == 1);
  CHECK(q.step() == 1.0);
  for (int i = 0; i < 100; ++i) CHECK(stochastic_quantize(0.0, q, rng).value == 0.0);

  SUBCASE("x = 0.25 rounds up a quarter of the time") {
    int ups = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
      const auto v = stochastic_quantize(0.25, q, rng);
      CHECK((v.value == 0.0 || v.value == 1.0));
      ups += v.level;
    }
    CHECK(std::abs(ups / static_cast<double>(n) - 0.25) < 4.0 * std::sqrt(0.25 * 0.75 / n));
  }
  SUBCASE("unbiased and within one step") {
    const QuantizerSpec q5{5, 2.0};
    CHECK(q5.level_value(q5.max_level()) == 2.0);
    for (double x : {-1.93, -0.4, 0.01, 0.777, 1.5}) {
      double s = 0.0;
      const int n = 100000;
      for (int i = 0; i < n; ++i) {
        const auto v = stochastic_quantize(x, q5, rng);
        CHECK(std::abs(v.value - x) <= q5.step() + 1e-15);
        CHECK(v.value == dequantize(v.level, v.negative, q5));
        s += v.value;
      }
      CHECK(std::abs(s / n - x) < 4.0 * q5.step() / 2.0 / std::sqrt(n));
    }
  }
  SUBCASE("values beyond a_max clip to the top level") {
    const QuantizerSpec q3{3, 1.0};
    const auto v = stochastic_quantize(-7.0, q3, rng);
    CHECK(v.negative);
    CHECK(v.level == 3);
    CHECK(v.value == -1.0);
  }
  CHECK_THROWS_AS(QuantizerSpec({1, 1.0}).validate(), InvalidInput);
  CHECK_THROWS_AS(QuantizerSpec({4, -1.0}).validate(), InvalidInput);
}

TEST_CASE("bits per iteration") {
  const auto per = make_cfg(Scheme::kPerParticle, 0.1);
  const auto shared = make_cfg(Scheme::kShared, 0.1);
  CHECK(bits_per_iteration(per, 10, 100) == doctest::Approx(10.0 * (oracle::log2_binomial(100, 10) + 50.0)));
  CHECK(bits_per_iteration(per, 10, 100) == doctest::Approx(939.767).epsilon(1e-6));
  CHECK(bits_per_iteration(shared, 10, 100) == doctest::Approx(543.977).epsilon(1e-6));
  const auto alpha = make_cfg(Scheme::kAlphaShared, 0.1, 5, {1, 2});
  CHECK(bits_per_iteration(alpha, 10, 100) == doctest::Approx(2.0 * oracle::log2_binomial(100, 10) + 500.0));
  CHECK(bits_for_k(per, 10, 100, 10, Accounting::kRealized) == 10.0 * (44.0 + 50.0) + 32.0);
  CompressionConfig fixed = shared;
  fixed.scale = FixedScale{1.0};
  CHECK(bits_for_k(fixed, 10, 100, 10, Accounting::kRealized) == 44.0 + 500.0);
}

TEST_CASE("solve_ratio") {
  const auto cfg = make_cfg(Scheme::kShared, std::nullopt, 3);
  const double at3 = bits_for_k(cfg, 4, 50, 3, Accounting::kRealized);
  CHECK(solve_ratio(at3, cfg, 4, 50) == 3);
  CHECK(solve_ratio(std::nextafter(at3, 0.0), cfg, 4, 50) == 2);
  const double at1 = bits_for_k(cfg, 4, 50, 1, Accounting::kRealized);
  try {
    (void)solve_ratio(at1 - 1.0, cfg, 4, 50);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(std::to_string(static_cast<long>(at1))) != std::string::npos);
  }
  CHECK(solve_ratio(1e9, cfg, 4, 50) == 50);

  SUBCASE("agrees with a linear-scan oracle on the analytic formula") {
    SeededRng rng(23);
    for (int t = 0; t < 50; ++t) {
      const std::size_t d = 5 + rng.below(120);
      const std::size_t np = 1 + rng.below(8);
      const std::size_t nb = 2 + rng.below(6);
      const auto c = make_cfg(rng.below(2) ? Scheme::kShared : Scheme::kPerParticle, std::nullopt, nb);
      const std::size_t g = c.scheme == Scheme::kShared ? 1 : np;
      const double budget = 20.0 + rng.uniform() * 3.0 * static_cast<double>(d * np);
      std::size_t best = 0;
      for (std::size_t k = 1; k <= d; ++k)
        if (g * oracle::log2_binomial(d, k) + static_cast<double>(np * nb * k) <= budget) best = k;
      if (best == 0) {
        CHECK_THROWS_AS(solve_ratio(budget, c, np, d, Accounting::kAnalytic), ConfigError);
      } else {
        CHECK(solve_ratio(budget, c, np, d, Accounting::kAnalytic) == best);
      }
    }
  }
}

TEST_CASE("compression config validation") {
  auto c = make_cfg(Scheme::kAlphaShared, 0.1, 5, {1, 3});
  CHECK_THROWS_AS(validate(c, 10, 100), ConfigError);
  c.share = {1, 5};
  CHECK_NOTHROW(validate(c, 10, 100));
  CHECK(group_count(c, 10) == 5);
  c.bit_budget = 100.0;
  CHECK_THROWS_AS(validate(c, 10, 100), ConfigError);
  CHECK(Rational::parse("0.5") == Rational{1, 2});
  CHECK(Rational::parse("2/4") == Rational{1, 2});
  CHECK_THROWS_AS(Rational::parse("0.3"), ConfigError);
  CHECK_THROWS_AS(Rational::parse("x"), ConfigError);
}

TEST_CASE("encode/decode") {
  SeededRng rng(24);
  SUBCASE("zero delta decodes to zero") {
    const Matrix z(3, 7);
    const auto cd = encode_delta(z, make_cfg(Scheme::kShared, std::nullopt), 2, rng);
    CHECK(decode_delta(cd) == z);
  }
  SUBCASE("k = d with fine quantization is within one step") {
    const Matrix m = random_matrix(rng, 4, 9);
    CompressionConfig c = make_cfg(Scheme::kPerParticle, 1.0, 20);
    double amax = 0.0;
    for (double v : m.flat()) amax = std::max(amax, std::abs(v));
    c.scale = FixedScale{amax};
    const auto cd = encode_delta(m, c, rng);
    const Matrix back = decode_delta(cd);
    const double step = QuantizerSpec{20, amax}.step();
    for (std::size_t i = 0; i < m.flat().size(); ++i) CHECK(std::abs(back.flat()[i] - m.flat()[i]) <= step);
  }
  SUBCASE("decoded entries live on the sparsity pattern and converge with N_b") {
    const Matrix m = random_matrix(rng, 6, 20);
    const auto c = make_cfg(Scheme::kAlphaShared, 0.25, 24, {1, 3});
    const auto cd = encode_delta(m, c, rng);
    const auto pat = sparsify(m, 5, c);
    CHECK(cd.pattern == pat);
    const Matrix back = decode_delta(cd);
    for (std::size_t n = 0; n < 6; ++n)
      for (std::size_t i = 0; i < 20; ++i) {
        const auto& g = pat.for_row(n);
        if (std::binary_search(g.begin(), g.end(), i))
          CHECK(back(n, i) == doctest::Approx(m(n, i)).epsilon(1e-5));
        else
          CHECK(back(n, i) == 0.0);
      }
  }
  SUBCASE("bit_count equals the realized formula for every scheme") {
    for (Scheme s : {Scheme::kPerParticle, Scheme::kShared, Scheme::kAlphaShared}) {
      const Matrix m = random_matrix(rng, 10, 100);
      const auto c = make_cfg(s, 0.1, 5, {1, 2});
      const auto cd = encode_delta(m, c, rng);
      CHECK(cd.bit_count == bits_for_k(c, 10, 100, 10, Accounting::kRealized));
      CHECK(cd.analytic_bits == doctest::Approx(bits_per_iteration(c, 10, 100)));
      CHECK(serialize(cd).payload_bits == cd.bit_count);
    }
  }
}

TEST_CASE("serialization round trip and malformed streams") {
  SeededRng rng(25);
  for (Scheme s : {Scheme::kPerParticle, Scheme::kShared, Scheme::kAlphaShared}) {
    for (bool fixed : {false, true}) {
      const Matrix m = random_matrix(rng, 4, 13);
      CompressionConfig c = make_cfg(s, std::nullopt, 4, {1, 2});
      if (fixed) c.scale = FixedScale{0.75};
      const auto cd = encode_delta(m, c, 3, rng);
      const Bitstream bs = serialize(cd);
      const CompressedDelta back = deserialize(bs.bytes);
      CHECK(back == cd);
      CHECK(decode_delta(back) == decode_delta(cd));
    }
  }
  const Matrix m = random_matrix(rng, 2, 6);
  const auto cd = encode_delta(m, make_cfg(Scheme::kShared, std::nullopt, 3), 2, rng);
  const Bitstream bs = serialize(cd);
  SUBCASE("truncated") {
    std::vector<std::uint8_t> cut(bs.bytes.begin(), bs.bytes.end() - 1);
    CHECK_THROWS_AS(deserialize(cut), DecodeError);
  }
  SUBCASE("empty") { CHECK_THROWS_AS(deserialize({}), DecodeError); }
  SUBCASE("bad scheme byte") {
    auto bad = bs.bytes;
    bad[4 + 8] = 0x7f;  // after the length prefix, N_p and d
    CHECK_THROWS_AS(deserialize(bad), DecodeError);
  }
  SUBCASE("length prefix longer than the data") {
    auto bad = bs.bytes;
    bad[0] = 0xff;
    CHECK_THROWS_AS(deserialize(bad), DecodeError);
  }
}
