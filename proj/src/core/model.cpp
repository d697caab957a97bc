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

#include "cpfl/core/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cpfl/core/error.hpp"

namespace cpfl {

namespace {

void require_finite(std::span<const double> v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) throw InvalidInput(std::string("non-finite value in ") + what);
}

}  // namespace

void ModelSpec::validate() const {
  require(num_classes >= 2, "model needs at least two classes");
  require(feature_dim >= 1, "model needs at least one feature");
}

LinearWeights unflatten(std::span<const double> params, const ModelSpec& model) {
  require(params.size() == model.dim(), "parameter length does not match model dimension");
  LinearWeights w{Matrix(model.num_classes, model.feature_dim), Vector(model.num_classes)};
  for (std::size_t c = 0; c < model.num_classes; ++c) {
    for (std::size_t j = 0; j < model.feature_dim; ++j)
      w.weights(c, j) = params[model.weight_index(c, j)];
    w.bias[c] = params[model.bias_index(c)];
  }
  return w;
}

Vector flatten(const LinearWeights& w, const ModelSpec& model) {
  require(w.weights.rows() == model.num_classes && w.weights.cols() == model.feature_dim &&
              w.bias.size() == model.num_classes,
          "weight shapes do not match model");
  Vector params(model.dim());
  for (std::size_t c = 0; c < model.num_classes; ++c) {
    for (std::size_t j = 0; j < model.feature_dim; ++j)
      params[model.weight_index(c, j)] = w.weights(c, j);
    params[model.bias_index(c)] = w.bias[c];
  }
  return params;
}

void validate_shard(const AgentShard& shard, const ModelSpec& model) {
  require(!shard.empty(), "shard is empty");
  for (const auto& ex : shard.examples) {
    require(ex.features.size() == model.feature_dim, "example has wrong feature width");
    require(ex.label < model.num_classes, "example label out of range");
    require_finite(ex.features, "features");
  }
}

void logits(std::span<const double> params, std::span<const double> features,
            const ModelSpec& model, std::span<double> out) {
  const std::size_t stride = model.feature_dim + 1;
  for (std::size_t c = 0; c < model.num_classes; ++c) {
    const double* w = params.data() + c * stride;
    double z = w[model.feature_dim];
    for (std::size_t j = 0; j < model.feature_dim; ++j) z += w[j] * features[j];
    out[c] = z;
  }
}

void softmax(std::span<double> z) {
  const double m = *std::max_element(z.begin(), z.end());
  double s = 0.0;
  for (double& v : z) {
    v = std::exp(v - m);
    s += v;
  }
  for (double& v : z) v /= s;
}

LossAndGrad loss_and_grad(std::span<const double> params, const AgentShard& shard,
                          const ModelSpec& model) {
  require(params.size() == model.dim(), "parameter length does not match model dimension");
  require(!shard.empty(), "shard is empty");
  require_finite(params, "parameters");

  const std::size_t stride = model.feature_dim + 1;
  LossAndGrad out{0.0, Vector(model.dim(), 0.0)};
  Vector z(model.num_classes);
  for (const auto& ex : shard.examples) {
    require_finite(ex.features, "features");
    require(ex.label < model.num_classes, "example label out of range");
    logits(params, ex.features, model, z);
    const double m = *std::max_element(z.begin(), z.end());
    double s = 0.0;
    for (double v : z) s += std::exp(v - m);
    const double log_norm = m + std::log(s);
    out.loss += log_norm - z[ex.label];
    for (std::size_t c = 0; c < model.num_classes; ++c) {
      const double p = std::exp(z[c] - log_norm);
      const double r = p - (c == ex.label ? 1.0 : 0.0);
      double* g = out.grad.data() + c * stride;
      for (std::size_t j = 0; j < model.feature_dim; ++j) g[j] += r * ex.features[j];
      g[model.feature_dim] += r;
    }
  }
  const double inv_n = 1.0 / static_cast<double>(shard.size());
  out.loss *= inv_n;
  for (double& g : out.grad) g *= inv_n;
  return out;
}

Vector log_prior_grad(std::span<const double> params, const PriorSpec& prior) {
  require(prior.variance > 0.0, "prior variance must be positive");
  require_finite(params, "parameters");
  Vector g(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) g[i] = -params[i] / prior.variance;
  return g;
}

}  // namespace cpfl
