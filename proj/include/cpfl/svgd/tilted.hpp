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

#include <functional>
#include <span>

#include "cpfl/core/model.hpp"
#include "cpfl/core/particles.hpp"
#include "cpfl/svgd/kernels.hpp"

namespace cpfl::svgd {

// Score (gradient of a log density up to a constant). Implementations must be
// safe to call concurrently.
using ScoreFn = std::function<Vector(std::span<const double>)>;

// Gradient of the local data loss L_k.
using DataGradFn = std::function<Vector(std::span<const double>)>;

DataGradFn shard_loss_gradient(const AgentShard& shard, const ModelSpec& model);

enum class Direction { kLearn, kUnlearn };

// p~(x) proportional to q(x) / t_k(x) * exp(-+ w * L_k(x) / temperature), with
// q and t_k the KDEs of the global and local particle sets. The minus sign is
// learning, the plus sign unlearning.
struct TiltedTarget {
  ParticleSet global_particles;
  ParticleSet local_particles;
  DataGradFn data_grad;
  double temperature = 1.0;
  Direction direction = Direction::kLearn;
  double data_weight = 1.0;  // N_k when weighting by shard size, else 1
  PriorSpec prior;

  void validate() const;
};

Vector tilted_score(std::span<const double> x, const TiltedTarget& target,
                    const KernelConfig& kernels);

ScoreFn make_score(TiltedTarget target, KernelConfig kernels);

// Target for refreshing an agent's local particles after a round:
// grad log q_new - grad log q_old + grad log t_old.
ScoreFn make_distillation_score(ParticleSet new_global, ParticleSet old_global,
                                ParticleSet old_local, double kde_bandwidth);

}  // namespace cpfl::svgd
