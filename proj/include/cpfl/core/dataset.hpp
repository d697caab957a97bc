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
#include <iosfwd>
#include <string>
#include <vector>

#include "cpfl/core/model.hpp"

namespace cpfl {

enum class Generator {
  kBlobs,           // Gaussian class clusters, iid label draw per example
  kClassPartition,  // each agent holds examples from a fixed subset of classes
};

// Fixed random hidden layer h = tanh(W x + b) standing in for a
// pre-trained feature extractor. width == 0 disables the map.
struct FeatureMapSpec {
  std::size_t width = 0;
  double gain = 1.0;

  friend bool operator==(const FeatureMapSpec&, const FeatureMapSpec&) = default;
};

struct DatasetSpec {
  Generator generator = Generator::kBlobs;
  std::size_t num_classes = 3;
  std::size_t feature_dim = 2;                // raw input width
  std::vector<std::size_t> agent_sizes{200};  // N_k per agent
  std::size_t test_size = 600;
  // Class subsets per agent for kClassPartition; empty selects the default
  // pairs {2k mod C, 2k+1 mod C}.
  std::vector<std::vector<std::size_t>> agent_classes;
  double separation = 3.0;  // scale of the class means
  double noise = 1.0;       // per-coordinate std of the within-class spread
  FeatureMapSpec feature_map;
  std::uint64_t seed = 1;

  friend bool operator==(const DatasetSpec&, const DatasetSpec&) = default;
};

struct Dataset {
  ModelSpec model;  // feature_dim is the width after the feature map
  std::vector<AgentShard> agents;
  AgentShard test;
};

// Class subsets actually used for each agent.
std::vector<std::vector<std::size_t>> resolved_agent_classes(const DatasetSpec& spec);

Dataset generate_dataset(const DatasetSpec& spec);

// CSV with the feature columns followed by the integer label; header row
// "x0,...,x{F-1},label".
void write_csv(std::ostream& os, const AgentShard& shard);
AgentShard read_csv(std::istream& is);

}  // namespace cpfl
