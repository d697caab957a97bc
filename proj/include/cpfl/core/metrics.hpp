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

#include "cpfl/core/model.hpp"
#include "cpfl/core/particles.hpp"

namespace cpfl {

// Bayesian model average: mean over particles of the softmax probabilities.
Vector predictive_probabilities(const ParticleSet& particles, std::span<const double> features,
                                const ModelSpec& model);

struct Prediction {
  std::size_t label = 0;      // argmax of the averaged probabilities, lowest index on ties
  double confidence = 0.0;    // the maximal averaged probability
  bool correct = false;
};

std::vector<Prediction> predict(const ParticleSet& particles, const AgentShard& test,
                                const ModelSpec& model);

double test_accuracy(const ParticleSet& particles, const AgentShard& test,
                     const ModelSpec& model);

// Accuracy restricted to each true class; NaN for classes absent from `test`.
Vector per_class_accuracy(const ParticleSet& particles, const AgentShard& test,
                          const ModelSpec& model);

struct EceBin {
  std::size_t count = 0;
  double accuracy = 0.0;
  double confidence = 0.0;
};

struct EceReport {
  std::size_t num_bins = 0;
  std::vector<EceBin> bins;
  double ece = 0.0;
};

// Index of the right-closed bin ((m)/M, (m+1)/M] holding `confidence`.
std::size_t ece_bin_index(double confidence, std::size_t num_bins);

EceReport expected_calibration_error(std::span<const Prediction> predictions,
                                     std::size_t num_bins);
EceReport expected_calibration_error(const ParticleSet& particles, const AgentShard& test,
                                     const ModelSpec& model, std::size_t num_bins = 10);

}  // namespace cpfl
