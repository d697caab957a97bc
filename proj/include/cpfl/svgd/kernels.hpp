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

#include <span>
#include <variant>

#include "cpfl/core/matrix.hpp"
#include "cpfl/core/particles.hpp"

namespace cpfl::svgd {

struct MedianHeuristic {
  friend bool operator==(const MedianHeuristic&, const MedianHeuristic&) = default;
};
struct FixedBandwidth {
  double h = 1.0;
  friend bool operator==(const FixedBandwidth&, const FixedBandwidth&) = default;
};
using BandwidthPolicy = std::variant<MedianHeuristic, FixedBandwidth>;

struct KernelConfig {
  BandwidthPolicy svgd_bandwidth = MedianHeuristic{};
  double kde_bandwidth = 0.55;  // lambda of the KDE kernel
  double bandwidth_floor = 1e-6;

  void validate() const;
  friend bool operator==(const KernelConfig&, const KernelConfig&) = default;
};

struct KernelValue {
  double k = 0.0;
  Vector grad_x;
};

// k(x, y) = exp(-|x - y|^2 / h) and its gradient with respect to x.
KernelValue rbf_kernel_and_grad(std::span<const double> x, std::span<const double> y, double h);

// med^2 / ln(N_p) over pairwise Euclidean distances; lower middle for even
// pair counts. Falls back to max(floor, med^2) for one particle or when the
// heuristic drops below the floor.
double median_bandwidth(const ParticleSet& particles, double floor);

double resolve_bandwidth(const ParticleSet& particles, const KernelConfig& cfg);

// Gradient of log[(1/N) sum_n exp(-|x - s_n|^2 / lambda)], max-shifted.
Vector kde_log_density_grad(std::span<const double> x, const ParticleSet& support, double lambda);

// The log density itself (without the kernel's normalizer), same stabilization.
double kde_log_density(std::span<const double> x, const ParticleSet& support, double lambda);

}  // namespace cpfl::svgd
