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
#include <string>
#include <vector>

#include "cpfl/core/dataset.hpp"
#include "cpfl/core/metrics.hpp"
#include "cpfl/protocol/federation.hpp"

namespace cpfl::protocol {

enum class Mode {
  kDsvgd,    // compressed DSVGD learning
  kForget,   // DSVGD learning followed by compressed Forget-SVGD
  kFedAvg,   // compressed FedAvg baseline
  kScratch,  // DSVGD learning over the agents outside the forget set
};

const char* mode_name(Mode m);
Mode parse_mode(const std::string& name);

struct ExperimentPlan {
  Mode mode = Mode::kDsvgd;
  std::size_t rounds = 100;
  std::size_t unlearn_rounds = 0;
  std::size_t eval_every = 10;
  std::vector<std::size_t> forget;  // U, required by kForget and kScratch
  std::size_t ece_bins = 10;
};

enum class Phase { kLearn, kUnlearn };

struct Evaluation {
  double accuracy = 0.0;
  double ece = 0.0;
  Vector per_class_accuracy;
};

struct PhasedRecord {
  Phase phase = Phase::kLearn;
  RoundRecord record;
};

struct ExperimentResult {
  std::vector<PhasedRecord> records;
  Evaluation initial;
  Evaluation final_eval;
  std::optional<Evaluation> before_unlearning;
  std::size_t k = 0;
  std::size_t num_particles = 0;
  std::size_t dim = 0;
  std::uint64_t total_bits = 0;
  // Classes held only by forgetting agents, and the rest.
  std::vector<std::size_t> forgotten_classes;
  std::vector<std::size_t> retained_classes;
};

Evaluation evaluate(const ParticleSet& particles, const AgentShard& test, const ModelSpec& model,
                    std::size_t ece_bins);

// Mean of the per-class accuracies over `classes` (NaN entries skipped).
double mean_class_accuracy(const Vector& per_class, const std::vector<std::size_t>& classes);

ExperimentResult run_experiment(const Dataset& data, const ExperimentPlan& plan,
                                const FederationConfig& federation,
                                const codec::CompressionConfig& compression, std::uint64_t seed);

}  // namespace cpfl::protocol
