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
#include <span>
#include <vector>

#include "cpfl/core/matrix.hpp"

namespace cpfl {

// Linear softmax classifier. Parameters are flattened class-major:
// class c occupies [c * (feature_dim + 1), (c + 1) * (feature_dim + 1)),
// with the bias stored last.
struct ModelSpec {
  std::size_t num_classes = 2;
  std::size_t feature_dim = 1;

  std::size_t dim() const { return num_classes * (feature_dim + 1); }
  std::size_t weight_index(std::size_t cls, std::size_t feature) const {
    return cls * (feature_dim + 1) + feature;
  }
  std::size_t bias_index(std::size_t cls) const {
    return cls * (feature_dim + 1) + feature_dim;
  }

  void validate() const;
};

// Weight matrix (num_classes x feature_dim) plus bias vector.
struct LinearWeights {
  Matrix weights;
  Vector bias;
};

LinearWeights unflatten(std::span<const double> params, const ModelSpec& model);
Vector flatten(const LinearWeights& w, const ModelSpec& model);

struct Example {
  Vector features;
  std::size_t label = 0;
};

struct AgentShard {
  std::vector<Example> examples;

  std::size_t size() const { return examples.size(); }
  bool empty() const { return examples.empty(); }
};

// Checks N_k >= 1, feature widths, label range and finiteness.
void validate_shard(const AgentShard& shard, const ModelSpec& model);

struct PriorSpec {
  double variance = 1.0;
  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

struct LossAndGrad {
  double loss = 0.0;
  Vector grad;
};

// Writes the class logits for one example into `out`.
void logits(std::span<const double> params, std::span<const double> features,
            const ModelSpec& model, std::span<double> out);

// In-place numerically stable softmax.
void softmax(std::span<double> z);

// Mean cross-entropy of the softmax-linear model over the shard and its
// exact gradient.
LossAndGrad loss_and_grad(std::span<const double> params, const AgentShard& shard,
                          const ModelSpec& model);

// Score of the isotropic Gaussian prior: -params / variance.
Vector log_prior_grad(std::span<const double> params, const PriorSpec& prior);

}  // namespace cpfl
