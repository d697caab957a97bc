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

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "cpfl/codec/codec.hpp"
#include "cpfl/core/model.hpp"
#include "cpfl/core/particles.hpp"
#include "cpfl/core/rng.hpp"
#include "cpfl/svgd/svgd.hpp"

namespace cpfl::protocol {

enum class Algorithm { kDsvgd, kFedAvg };
enum class Scheduler { kRoundRobin, kUniform };

struct FederationConfig {
  Algorithm algorithm = Algorithm::kDsvgd;
  std::size_t num_particles = 10;  // forced to 1 for FedAvg
  std::size_t local_steps = 5;     // L
  std::optional<std::size_t> distill_steps;  // L_local; defaults to L
  double temperature = 1.0;
  PriorSpec prior;
  svgd::KernelConfig kernels;
  double step_size = 0.1;  // AdaGrad base rate
  bool weight_by_shard_size = false;
  Scheduler scheduler = Scheduler::kRoundRobin;

  std::size_t distill() const { return distill_steps.value_or(local_steps); }
  void validate() const;
  friend bool operator==(const FederationConfig&, const FederationConfig&) = default;
};

// Gradient of an agent's local loss at `params`.
using LossGradFn = std::function<Vector(std::span<const double> params, const AgentShard& shard)>;

LossGradFn softmax_loss_gradient(const ModelSpec& model);

struct AgentState {
  AgentShard shard;
  ParticleSet local_particles;
  svgd::AdaGradState ada;          // for the global-particle update
  svgd::AdaGradState distill_ada;  // for the local-particle refresh
};

struct FederationState {
  ModelSpec model;
  FederationConfig config;
  codec::CompressionConfig compression;
  std::size_t k = 0;  // retained entries per particle, resolved once
  std::uint64_t seed = 0;
  LossGradFn loss_grad;

  ParticleSet global_particles;
  std::vector<AgentState> agents;
  std::size_t round = 0;
  std::size_t cursor = 0;  // round-robin position
  std::uint64_t cumulative_bits = 0;
};

struct RoundRecord {
  std::size_t round = 0;
  std::size_t agent = 0;
  std::size_t bits = 0;
  std::uint64_t cumulative_bits = 0;
  // Filled by the experiment driver at evaluation rounds.
  std::optional<double> accuracy;
  std::optional<double> ece;
  Vector per_class_accuracy;
  std::chrono::nanoseconds duration{0};
};

struct UnlearnRequest {
  std::vector<std::size_t> forget;  // agent ids U

  void validate(std::size_t num_agents) const;
};

// Global particles and every agent's local particles are drawn i.i.d. from
// the prior. Throws ConfigError on inconsistent dimensions or an infeasible
// compression budget.
FederationState init_learning(const ModelSpec& model, std::vector<AgentShard> shards,
                              const FederationConfig& config,
                              const codec::CompressionConfig& compression, std::uint64_t seed);

// Same as init_learning but starting from existing global particles.
FederationState init_from_particles(const ModelSpec& model, std::vector<AgentShard> shards,
                                    ParticleSet global, const FederationConfig& config,
                                    const codec::CompressionConfig& compression,
                                    std::uint64_t seed);

// Re-draws the local particles of the forgetting agents from the prior and
// resets their optimizer state.
void begin_unlearning(FederationState& state, const UnlearnRequest& request);

RoundRecord run_learning_round(FederationState& state);
RoundRecord run_unlearning_round(FederationState& state, const UnlearnRequest& request);
RoundRecord run_fedavg_round(FederationState& state);

// Lower-level pieces, exposed for tests.
std::size_t schedule_agent(FederationState& state, std::span<const std::size_t> eligible);

struct Upload {
  codec::Bitstream stream;
  Matrix applied_delta;  // what both sides add to the downloaded particles
};
// Encodes, serializes and decodes the update exactly as the server sees it.
Upload transmit(const Matrix& delta, const FederationState& state, std::size_t round);

}  // namespace cpfl::protocol
