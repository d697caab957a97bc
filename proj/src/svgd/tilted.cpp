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

#include "cpfl/svgd/tilted.hpp"

#include <memory>

#include "cpfl/core/error.hpp"

namespace cpfl::svgd {

DataGradFn shard_loss_gradient(const AgentShard& shard, const ModelSpec& model) {
  validate_shard(shard, model);
  auto owned = std::make_shared<const AgentShard>(shard);
  return [owned, model](std::span<const double> x) {
    return loss_and_grad(x, *owned, model).grad;
  };
}

void TiltedTarget::validate() const {
  require(global_particles.dim() == local_particles.dim(),
          "global and local particle sets differ in dimension");
  require(temperature > 0.0, "temperature must be positive");
  require(static_cast<bool>(data_grad), "tilted target has no data gradient");
}

Vector tilted_score(std::span<const double> x, const TiltedTarget& target,
                    const KernelConfig& kernels) {
  Vector s = kde_log_density_grad(x, target.global_particles, kernels.kde_bandwidth);
  const Vector t = kde_log_density_grad(x, target.local_particles, kernels.kde_bandwidth);
  const Vector g = target.data_grad(x);
  require(g.size() == x.size(), "data gradient has wrong dimension");
  const double sign = target.direction == Direction::kLearn ? -1.0 : 1.0;
  const double c = sign * target.data_weight / target.temperature;
  for (std::size_t i = 0; i < s.size(); ++i) s[i] = (s[i] - t[i]) + c * g[i];
  return s;
}

ScoreFn make_score(TiltedTarget target, KernelConfig kernels) {
  target.validate();
  kernels.validate();
  auto t = std::make_shared<const TiltedTarget>(std::move(target));
  return [t, kernels](std::span<const double> x) { return tilted_score(x, *t, kernels); };
}

ScoreFn make_distillation_score(ParticleSet new_global, ParticleSet old_global,
                                ParticleSet old_local, double kde_bandwidth) {
  require(kde_bandwidth > 0.0, "KDE bandwidth must be positive");
  struct Sets {
    ParticleSet now, before, local;
  };
  auto sets = std::make_shared<const Sets>(
      Sets{std::move(new_global), std::move(old_global), std::move(old_local)});
  return [sets, kde_bandwidth](std::span<const double> x) {
    Vector s = kde_log_density_grad(x, sets->now, kde_bandwidth);
    const Vector b = kde_log_density_grad(x, sets->before, kde_bandwidth);
    const Vector t = kde_log_density_grad(x, sets->local, kde_bandwidth);
    for (std::size_t i = 0; i < s.size(); ++i) s[i] = s[i] - b[i] + t[i];
    return s;
  };
}

}  // namespace cpfl::svgd
