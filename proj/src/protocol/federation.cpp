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

#include "cpfl/protocol/federation.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "cpfl/core/error.hpp"

namespace cpfl::protocol {

namespace {

constexpr std::uint64_t kInitStream = 0x1417;
constexpr std::uint64_t kCodecStream = 0xc0dec;
constexpr std::uint64_t kScheduleStream = 0x5c4ed;
constexpr std::uint64_t kRedrawStream = 0x4ed4a3;

ParticleSet draw_prior(SeededRng& rng, std::size_t count, std::size_t dim, const PriorSpec& prior) {
  ParticleSet p(count, dim);
  const double sd = std::sqrt(prior.variance);
  for (double& v : p.flat()) v = sd * rng.normal();
  return p;
}

Matrix difference(const Matrix& a, const Matrix& b) {
  Matrix d(a.rows(), a.cols());
  auto out = d.flat();
  auto x = a.flat();
  auto y = b.flat();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] - y[i];
  return d;
}

ParticleSet add(const ParticleSet& base, const Matrix& delta) {
  ParticleSet out = base;
  auto o = out.flat();
  auto d = delta.flat();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] += d[i];
  return out;
}

std::vector<std::size_t> all_agents(const FederationState& s) {
  std::vector<std::size_t> ids(s.agents.size());
  for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = i;
  return ids;
}

svgd::AdaGradState fresh_ada(const FederationConfig& cfg) {
  return svgd::AdaGradState{cfg.step_size, 1e-8, {}};
}

// Steps shared by DSVGD learning and Forget-SVGD rounds (Steps 2 and 3).
RoundRecord particle_round(FederationState& state, std::size_t agent_id, svgd::Direction dir) {
  const auto start = std::chrono::steady_clock::now();
  AgentState& agent = state.agents[agent_id];
  const FederationConfig& cfg = state.config;

  const ParticleSet downloaded = state.global_particles;
  svgd::TiltedTarget target;
  target.global_particles = downloaded;
  target.local_particles = agent.local_particles;
  {
    auto loss_grad = state.loss_grad;
    auto shard = std::make_shared<const AgentShard>(agent.shard);
    target.data_grad = [loss_grad, shard](std::span<const double> x) { return loss_grad(x, *shard); };
  }
  target.temperature = cfg.temperature;
  target.direction = dir;
  target.data_weight = cfg.weight_by_shard_size ? static_cast<double>(agent.shard.size()) : 1.0;
  target.prior = cfg.prior;
  const svgd::ScoreFn score = svgd::make_score(std::move(target), cfg.kernels);

  ParticleSet particles = downloaded;
  for (std::size_t l = 0; l < cfg.local_steps; ++l)
    particles = svgd::svgd_step(particles, score, cfg.kernels, agent.ada);

  const std::size_t round = state.round + 1;
  const Upload up = transmit(difference(particles, downloaded), state, round);
  // Agent and server both apply the decoded delta, so their views agree.
  ParticleSet updated = add(downloaded, up.applied_delta);
  if (!updated.all_finite())
    throw NumericalError("non-finite global particles after round " + std::to_string(round));

  const svgd::ScoreFn distill = svgd::make_distillation_score(
      updated, downloaded, agent.local_particles, cfg.kernels.kde_bandwidth);
  ParticleSet local = agent.local_particles;
  for (std::size_t l = 0; l < cfg.distill(); ++l)
    local = svgd::svgd_step(local, distill, cfg.kernels, agent.distill_ada);
  agent.local_particles = std::move(local);

  state.global_particles = std::move(updated);
  state.round = round;
  state.cumulative_bits += up.stream.payload_bits;

  RoundRecord rec;
  rec.round = round;
  rec.agent = agent_id;
  rec.bits = up.stream.payload_bits;
  rec.cumulative_bits = state.cumulative_bits;
  rec.duration = std::chrono::steady_clock::now() - start;
  return rec;
}

}  // namespace

void FederationConfig::validate() const {
  if (num_particles < 1) throw ConfigError("federation.particles must be at least 1");
  if (!(temperature > 0.0)) throw ConfigError("federation.temperature must be positive");
  if (!(prior.variance > 0.0)) throw ConfigError("federation.prior_variance must be positive");
  if (!(step_size > 0.0)) throw ConfigError("federation.step_size must be positive");
  try {
    kernels.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("federation kernels: ") + e.what());
  }
}

LossGradFn softmax_loss_gradient(const ModelSpec& model) {
  return [model](std::span<const double> params, const AgentShard& shard) {
    return loss_and_grad(params, shard, model).grad;
  };
}

void UnlearnRequest::validate(std::size_t num_agents) const {
  if (forget.empty()) throw ConfigError("forget set is empty");
  std::vector<std::size_t> sorted = forget;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("forget set lists an agent twice");
  if (sorted.back() >= num_agents) throw ConfigError("forget set names an unknown agent");
  if (sorted.size() >= num_agents) throw ConfigError("forget set must be a proper subset of the agents");
}

FederationState init_from_particles(const ModelSpec& model, std::vector<AgentShard> shards,
                                    ParticleSet global, const FederationConfig& config,
                                    const codec::CompressionConfig& compression,
                                    std::uint64_t seed) {
  model.validate();
  config.validate();
  if (shards.empty()) throw ConfigError("federation needs at least one agent");
  FederationState s;
  s.model = model;
  s.config = config;
  s.compression = compression;
  if (config.algorithm == Algorithm::kFedAvg) {
    s.config.num_particles = 1;
    s.compression.scheme = codec::Scheme::kPerParticle;
  }
  if (global.count() != s.config.num_particles || global.dim() != model.dim())
    throw ConfigError("particle set shape does not match the model dimension / particle count");
  s.seed = seed;
  s.loss_grad = softmax_loss_gradient(model);
  s.k = codec::resolve_k(s.compression, s.config.num_particles, model.dim());
  s.global_particles = std::move(global);

  SeededRng rng(derive_seed(seed, kInitStream, 1));
  s.agents.reserve(shards.size());
  for (auto& shard : shards) {
    try {
      validate_shard(shard, model);
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("agent shard: ") + e.what());
    }
    s.agents.push_back({std::move(shard),
                        draw_prior(rng, s.config.num_particles, model.dim(), config.prior),
                        fresh_ada(config), fresh_ada(config)});
  }
  return s;
}

FederationState init_learning(const ModelSpec& model, std::vector<AgentShard> shards,
                              const FederationConfig& config,
                              const codec::CompressionConfig& compression, std::uint64_t seed) {
  config.validate();
  model.validate();
  const std::size_t np = config.algorithm == Algorithm::kFedAvg ? 1 : config.num_particles;
  SeededRng rng(derive_seed(seed, kInitStream, 0));
  ParticleSet global = draw_prior(rng, np, model.dim(), config.prior);
  return init_from_particles(model, std::move(shards), std::move(global), config, compression, seed);
}

void begin_unlearning(FederationState& state, const UnlearnRequest& request) {
  request.validate(state.agents.size());
  SeededRng rng(derive_seed(state.seed, kRedrawStream, state.round));
  for (std::size_t id : request.forget) {
    auto& a = state.agents[id];
    a.local_particles =
        draw_prior(rng, state.config.num_particles, state.model.dim(), state.config.prior);
    a.ada = fresh_ada(state.config);
    a.distill_ada = fresh_ada(state.config);
  }
  state.cursor = 0;
}

std::size_t schedule_agent(FederationState& state, std::span<const std::size_t> eligible) {
  require(!eligible.empty(), "no eligible agents to schedule");
  if (state.config.scheduler == Scheduler::kUniform) {
    SeededRng rng(derive_seed(state.seed, kScheduleStream, state.round + 1));
    return eligible[rng.below(eligible.size())];
  }
  const std::size_t id = eligible[state.cursor % eligible.size()];
  ++state.cursor;
  return id;
}

Upload transmit(const Matrix& delta, const FederationState& state, std::size_t round) {
  SeededRng rng(derive_seed(state.seed, kCodecStream, round));
  const codec::CompressedDelta cd = codec::encode_delta(delta, state.compression, state.k, rng);
  Upload up;
  up.stream = codec::serialize(cd);
  // The server reconstructs from the serialized bits alone.
  up.applied_delta = codec::decode_delta(codec::deserialize(up.stream.bytes));
  if (state.compression.bit_budget && static_cast<double>(up.stream.payload_bits) > *state.compression.bit_budget)
    throw NumericalError("uplink message exceeds the bit budget");
  return up;
}

RoundRecord run_learning_round(FederationState& state) {
  if (state.config.algorithm != Algorithm::kDsvgd)
    throw InvalidInput("run_learning_round needs a DSVGD federation");
  const auto ids = all_agents(state);
  const std::size_t agent = schedule_agent(state, ids);
  return particle_round(state, agent, svgd::Direction::kLearn);
}

RoundRecord run_unlearning_round(FederationState& state, const UnlearnRequest& request) {
  if (state.config.algorithm != Algorithm::kDsvgd)
    throw InvalidInput("run_unlearning_round needs a DSVGD federation");
  request.validate(state.agents.size());
  std::vector<std::size_t> eligible = request.forget;
  std::sort(eligible.begin(), eligible.end());
  const std::size_t agent = schedule_agent(state, eligible);
  return particle_round(state, agent, svgd::Direction::kUnlearn);
}

RoundRecord run_fedavg_round(FederationState& state) {
  if (state.config.algorithm != Algorithm::kFedAvg)
    throw InvalidInput("run_fedavg_round needs a FedAvg federation");
  const auto start = std::chrono::steady_clock::now();
  const auto ids = all_agents(state);
  const std::size_t agent_id = schedule_agent(state, ids);
  AgentState& agent = state.agents[agent_id];

  const ParticleSet downloaded = state.global_particles;
  ParticleSet params = downloaded;
  Matrix descent(1, state.model.dim());
  for (std::size_t l = 0; l < state.config.local_steps; ++l) {
    const Vector g = state.loss_grad(params.row(0), agent.shard);
    for (std::size_t i = 0; i < g.size(); ++i) descent(0, i) = -g[i];
    svgd::adagrad_apply(params, descent, agent.ada);
  }

  const std::size_t round = state.round + 1;
  const Upload up = transmit(difference(params, downloaded), state, round);
  ParticleSet updated = add(downloaded, up.applied_delta);
  if (!updated.all_finite())
    throw NumericalError("non-finite parameters after round " + std::to_string(round));
  state.global_particles = std::move(updated);
  state.round = round;
  state.cumulative_bits += up.stream.payload_bits;

  RoundRecord rec;
  rec.round = round;
  rec.agent = agent_id;
  rec.bits = up.stream.payload_bits;
  rec.cumulative_bits = state.cumulative_bits;
  rec.duration = std::chrono::steady_clock::now() - start;
  return rec;
}

}  // namespace cpfl::protocol
