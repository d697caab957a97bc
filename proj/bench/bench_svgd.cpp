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

// Parallel SVGD kernels against the serial reference.
//
//   bench_svgd --benchmark_filter=Step
//   OMP_NUM_THREADS=8 bench_svgd

#include <benchmark/benchmark.h>

#include "cpfl/core/dataset.hpp"
#include "cpfl/core/rng.hpp"
#include "cpfl/svgd/reference.hpp"
#include "cpfl/svgd/svgd.hpp"
#include "cpfl/svgd/tilted.hpp"

namespace {

using namespace cpfl;

struct Problem {
  svgd::ScoreFn score;
  ParticleSet particles;
};

// A tilted target on a blobs shard behind a tanh feature map of the given width.
Problem make_problem(std::size_t num_particles, std::size_t width) {
  DatasetSpec spec;
  spec.agent_sizes = {200};
  spec.test_size = 3;
  spec.feature_map.width = width;
  spec.seed = 17;
  const Dataset data = generate_dataset(spec);
  const std::size_t d = data.model.dim();
  SeededRng rng(3);
  auto draw = [&] {
    ParticleSet p(num_particles, d);
    for (double& v : p.flat()) v = rng.normal();
    return p;
  };
  svgd::TiltedTarget target;
  target.global_particles = draw();
  target.local_particles = draw();
  target.data_grad = svgd::shard_loss_gradient(data.agents[0], data.model);
  target.data_weight = 200.0;
  return {svgd::make_score(target, {}), target.global_particles};
}

template <class StepFn>
void run_step(benchmark::State& state, StepFn step) {
  const Problem p = make_problem(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    svgd::AdaGradState ada;
    benchmark::DoNotOptimize(step(p.particles, p.score, svgd::KernelConfig{}, ada));
  }
  state.counters["d"] = static_cast<double>(p.particles.dim());
}

void BM_StepParallel(benchmark::State& state) {
  run_step(state, [](auto&&... a) { return svgd::svgd_step(a...); });
}

void BM_StepReference(benchmark::State& state) {
  run_step(state, [](auto&&... a) { return svgd::reference::svgd_step(a...); });
}

template <class DirFn>
void run_direction(benchmark::State& state, DirFn dir) {
  const Problem p = make_problem(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const double h = svgd::median_bandwidth(p.particles, 1e-6);
  for (auto _ : state) benchmark::DoNotOptimize(dir(p.particles, p.score, h));
}

void BM_DirectionParallel(benchmark::State& state) {
  run_direction(state, [](auto&&... a) { return svgd::stein_direction(a...); });
}

void BM_DirectionReference(benchmark::State& state) {
  run_direction(state, [](auto&&... a) { return svgd::reference::stein_direction(a...); });
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int np : {10, 50, 200})
    for (int width : {0, 100}) b->Args({np, width});
  b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_StepParallel)->Apply(sizes);
BENCHMARK(BM_StepReference)->Apply(sizes);
BENCHMARK(BM_DirectionParallel)->Apply(sizes);
BENCHMARK(BM_DirectionReference)->Apply(sizes);

BENCHMARK_MAIN();
