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

#include "cpfl/core/dataset.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "cpfl/core/error.hpp"
#include "cpfl/core/rng.hpp"

namespace cpfl {

namespace {

struct HiddenLayer {
  Matrix w;
  Vector b;

  Vector apply(const Vector& x) const {
    if (w.empty()) return x;
    Vector h(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double s = b[i];
      for (std::size_t j = 0; j < x.size(); ++j) s += w(i, j) * x[j];
      h[i] = std::tanh(s);
    }
    return h;
  }
};

HiddenLayer make_hidden_layer(const DatasetSpec& spec) {
  HiddenLayer layer;
  if (spec.feature_map.width == 0) return layer;
  SeededRng rng(derive_seed(spec.seed, 0xfeed));
  layer.w = Matrix(spec.feature_map.width, spec.feature_dim);
  layer.b.resize(spec.feature_map.width);
  const double scale = spec.feature_map.gain / std::sqrt(static_cast<double>(spec.feature_dim));
  for (std::size_t i = 0; i < spec.feature_map.width; ++i) {
    for (std::size_t j = 0; j < spec.feature_dim; ++j) layer.w(i, j) = scale * rng.normal();
    layer.b[i] = spec.feature_map.gain * rng.normal();
  }
  return layer;
}

}  // namespace

std::vector<std::vector<std::size_t>> resolved_agent_classes(const DatasetSpec& spec) {
  const std::size_t k = spec.agent_sizes.size();
  if (!spec.agent_classes.empty()) return spec.agent_classes;
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t a = 0; a < k; ++a) {
    if (spec.generator == Generator::kBlobs) {
      for (std::size_t c = 0; c < spec.num_classes; ++c) out[a].push_back(c);
    } else {
      out[a] = {(2 * a) % spec.num_classes, (2 * a + 1) % spec.num_classes};
    }
  }
  return out;
}

Dataset generate_dataset(const DatasetSpec& spec) {
  require(spec.num_classes >= 2, "dataset needs at least two classes");
  require(spec.feature_dim >= 1, "dataset needs at least one feature");
  require(!spec.agent_sizes.empty(), "dataset needs at least one agent");
  require(spec.test_size >= 1, "test set must be non-empty");
  require(spec.noise > 0.0, "noise must be positive");
  const auto classes = resolved_agent_classes(spec);
  require(classes.size() == spec.agent_sizes.size(), "agent_classes length must equal agent count");

  SeededRng mean_rng(derive_seed(spec.seed, 0x3ea5));
  Matrix means(spec.num_classes, spec.feature_dim);
  for (std::size_t c = 0; c < spec.num_classes; ++c)
    for (std::size_t j = 0; j < spec.feature_dim; ++j)
      means(c, j) = spec.separation * mean_rng.normal();

  const HiddenLayer hidden = make_hidden_layer(spec);

  auto draw = [&](SeededRng& rng, std::size_t label) {
    Vector x(spec.feature_dim);
    for (std::size_t j = 0; j < spec.feature_dim; ++j) x[j] = means(label, j) + spec.noise * rng.normal();
    return Example{hidden.apply(x), label};
  };

  Dataset ds;
  ds.model = {spec.num_classes, spec.feature_map.width == 0 ? spec.feature_dim : spec.feature_map.width};
  ds.agents.resize(spec.agent_sizes.size());
  for (std::size_t a = 0; a < spec.agent_sizes.size(); ++a) {
    require(spec.agent_sizes[a] >= 1, "every agent needs at least one example");
    const auto& own = classes[a];
    require(!own.empty(), "every agent needs at least one class");
    for (std::size_t c : own) require(c < spec.num_classes, "agent class out of range");
    SeededRng rng(derive_seed(spec.seed, 0xa6e7, a));
    auto& ex = ds.agents[a].examples;
    ex.reserve(spec.agent_sizes[a]);
    for (std::size_t i = 0; i < spec.agent_sizes[a]; ++i) {
      const std::size_t label = spec.generator == Generator::kBlobs
                                    ? own[rng.below(own.size())]
                                    : own[i % own.size()];
      ex.push_back(draw(rng, label));
    }
  }

  SeededRng test_rng(derive_seed(spec.seed, 0x7e57));
  ds.test.examples.reserve(spec.test_size);
  for (std::size_t i = 0; i < spec.test_size; ++i)
    ds.test.examples.push_back(draw(test_rng, i % spec.num_classes));
  return ds;
}

void write_csv(std::ostream& os, const AgentShard& shard) {
  require(!shard.empty(), "cannot serialize an empty shard");
  const std::size_t f = shard.examples.front().features.size();
  for (std::size_t j = 0; j < f; ++j) os << 'x' << j << ',';
  os << "label\n";
  os << std::setprecision(17);
  for (const auto& ex : shard.examples) {
    for (double v : ex.features) os << v << ',';
    os << ex.label << '\n';
  }
}

AgentShard read_csv(std::istream& is) {
  AgentShard shard;
  std::string line;
  if (!std::getline(is, line)) throw InvalidInput("CSV is empty");
  std::size_t width = 0;
  for (char ch : line) width += ch == ',' ? 1 : 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Example ex;
    while (std::getline(ss, cell, ',')) {
      try {
        ex.features.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidInput("malformed CSV cell '" + cell + "'");
      }
    }
    if (ex.features.size() != width + 1) throw InvalidInput("CSV row has wrong column count");
    const double label = ex.features.back();
    ex.features.pop_back();
    if (label < 0 || label != std::floor(label)) throw InvalidInput("CSV label is not a class index");
    ex.label = static_cast<std::size_t>(label);
    shard.examples.push_back(std::move(ex));
  }
  return shard;
}

}  // namespace cpfl
