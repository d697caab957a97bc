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

#include "cpfl/codec/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

#include "cpfl/core/error.hpp"

namespace cpfl::codec {

namespace {

// Smallest float32 not below m, so per-message ranges never clip the maximum.
float round_up_to_float(double m) {
  auto f = static_cast<float>(m);
  if (static_cast<double>(f) < m) f = std::nextafter(f, std::numeric_limits<float>::infinity());
  return f;
}

std::size_t payload_bits(const CompressedDelta& cd) {
  return cd.pattern.groups.size() * position_code_bits(cd.dim, cd.k) +
         cd.num_particles * cd.bits_per_entry * cd.k +
         (cd.per_message_scale ? kScaleHeaderBits : 0);
}

}  // namespace

CompressedDelta encode_delta(const Matrix& delta, const CompressionConfig& cfg, SeededRng& rng) {
  return encode_delta(delta, cfg, resolve_k(cfg, delta.rows(), delta.cols()), rng);
}

CompressedDelta encode_delta(const Matrix& delta, const CompressionConfig& cfg, std::size_t k,
                             SeededRng& rng) {
  validate_scheme(cfg, delta.rows(), delta.cols());
  require(delta.all_finite(), "delta contains non-finite values");
  CompressedDelta cd;
  cd.num_particles = delta.rows();
  cd.dim = delta.cols();
  cd.scheme = cfg.scheme;
  cd.share = cfg.share;
  cd.k = k;
  cd.bits_per_entry = cfg.bits_per_entry;
  cd.pattern = sparsify(delta, k, cfg);
  cd.per_message_scale = std::holds_alternative<PerMessageScale>(cfg.scale);

  if (cd.per_message_scale) {
    double m = 0.0;
    for (std::size_t n = 0; n < cd.num_particles; ++n)
      for (std::size_t j : cd.pattern.for_row(n)) m = std::max(m, std::abs(delta(n, j)));
    cd.a_max = static_cast<double>(round_up_to_float(m));
  } else {
    cd.a_max = std::get<FixedScale>(cfg.scale).a_max;
  }

  const QuantizerSpec spec{cd.bits_per_entry, cd.a_max};
  const std::uint64_t base = rng.next_u64();
  cd.codes.assign(cd.num_particles, {});
  for (std::size_t n = 0; n < cd.num_particles; ++n) {
    SeededRng row_rng(derive_seed(base, n));
    auto& row = cd.codes[n];
    row.reserve(k);
    for (std::size_t j : cd.pattern.for_row(n)) {
      const double x = delta(n, j);
      if (cd.a_max == 0.0) {
        row.push_back({false, 0});
        continue;
      }
      const QuantizedValue q = stochastic_quantize(x, spec, row_rng);
      row.push_back({q.negative, q.level});
    }
  }
  cd.bit_count = payload_bits(cd);
  cd.analytic_bits = bits_for_k(cfg, cd.num_particles, cd.dim, k, Accounting::kAnalytic);
  return cd;
}

Matrix decode_delta(const CompressedDelta& cd) {
  Matrix out(cd.num_particles, cd.dim, 0.0);
  if (cd.a_max == 0.0) return out;
  const QuantizerSpec spec{cd.bits_per_entry, cd.a_max};
  for (std::size_t n = 0; n < cd.num_particles; ++n) {
    const auto& idx = cd.pattern.for_row(n);
    for (std::size_t e = 0; e < idx.size(); ++e)
      out(n, idx[e]) = dequantize(cd.codes[n][e].level, cd.codes[n][e].negative, spec);
  }
  return out;
}

Bitstream serialize(const CompressedDelta& cd) {
  BitWriter w;
  w.write(cd.num_particles, 32);
  w.write(cd.dim, 32);
  w.write(static_cast<std::uint8_t>(cd.scheme), 8);
  w.write(cd.share.num, 32);
  w.write(cd.share.den, 32);
  w.write(cd.k, 32);
  w.write(cd.bits_per_entry, 8);
  w.write(cd.per_message_scale ? 1 : 0, 8);
  if (!cd.per_message_scale) w.write(std::bit_cast<std::uint64_t>(cd.a_max), 64);
  const std::size_t framing = w.bit_size();

  if (cd.per_message_scale) w.write(std::bit_cast<std::uint32_t>(static_cast<float>(cd.a_max)), 32);
  for (const auto& g : cd.pattern.groups) encode_positions(g, cd.dim, w);
  for (const auto& row : cd.codes)
    for (const auto& c : row) {
      w.write_bit(c.negative);
      w.write(c.level, cd.bits_per_entry - 1);
    }
  const std::size_t payload = w.bit_size() - framing;

  BitWriter framed;
  framed.write(w.bit_size(), 32);
  BitReader copy(w.bytes(), w.bit_size());
  for (std::size_t i = 0; i < w.bit_size(); ++i) framed.write_bit(copy.read_bit());
  return {framed.bytes(), framed.bit_size(), payload};
}

CompressedDelta deserialize(const std::vector<std::uint8_t>& bytes) {
  BitReader head(bytes);
  const std::size_t length = head.read(32);
  if (length > head.remaining()) throw DecodeError("bitstream shorter than its length prefix");
  BitReader r(bytes, 32 + length);
  r.read(32);

  CompressedDelta cd;
  cd.num_particles = r.read(32);
  cd.dim = r.read(32);
  const auto scheme = r.read(8);
  if (scheme > 2) throw DecodeError("unknown scheme id");
  cd.scheme = static_cast<Scheme>(scheme);
  cd.share.num = static_cast<std::uint32_t>(r.read(32));
  cd.share.den = static_cast<std::uint32_t>(r.read(32));
  cd.k = r.read(32);
  cd.bits_per_entry = r.read(8);
  const auto policy = r.read(8);
  if (policy > 1) throw DecodeError("unknown scale policy");
  cd.per_message_scale = policy == 1;
  if (!cd.per_message_scale) cd.a_max = std::bit_cast<double>(r.read(64));

  if (cd.num_particles == 0 || cd.dim == 0 || cd.k == 0 || cd.k > cd.dim)
    throw DecodeError("inconsistent dimensions in header");
  if (cd.bits_per_entry < 2 || cd.bits_per_entry > 32) throw DecodeError("bad bits per entry");
  CompressionConfig cfg;
  cfg.scheme = cd.scheme;
  cfg.share = cd.share;
  cfg.bits_per_entry = cd.bits_per_entry;
  try {
    validate_scheme(cfg, cd.num_particles, cd.dim);
  } catch (const ConfigError& e) {
    throw DecodeError(std::string("inadmissible header: ") + e.what());
  }
  const std::size_t groups = group_count(cfg, cd.num_particles);

  if (cd.per_message_scale) cd.a_max = std::bit_cast<float>(static_cast<std::uint32_t>(r.read(32)));
  if (!std::isfinite(cd.a_max) || cd.a_max < 0.0) throw DecodeError("bad a_max");
  cd.pattern.rows_per_group = cd.num_particles / groups;
  for (std::size_t g = 0; g < groups; ++g)
    cd.pattern.groups.push_back(decode_positions(r, cd.dim, cd.k));
  cd.codes.assign(cd.num_particles, {});
  for (auto& row : cd.codes) {
    row.resize(cd.k);
    for (auto& c : row) {
      c.negative = r.read_bit();
      c.level = static_cast<std::uint32_t>(r.read(cd.bits_per_entry - 1));
    }
  }
  if (r.remaining() != 0) throw DecodeError("trailing bits after payload");
  cd.bit_count = payload_bits(cd);
  cd.analytic_bits = groups * position_bits(cd.dim, cd.k) +
                     static_cast<double>(cd.num_particles * cd.bits_per_entry * cd.k);
  return cd;
}

}  // namespace cpfl::codec
