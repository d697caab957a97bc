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
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "cpfl/codec/config.hpp"
#include "cpfl/core/dataset.hpp"
#include "cpfl/protocol/experiment.hpp"
#include "cpfl/protocol/federation.hpp"

namespace cpfl::cli {

class ConfigParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Carries every violated invariant, each prefixed with its field path.
class ConfigValidationError : public std::runtime_error {
 public:
  explicit ConfigValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// Bit budget either absolute or as a multiple of the model dimension d.
struct BudgetSpec {
  double value = 1.0;
  bool times_dim = true;

  double resolve(std::size_t dim) const { return times_dim ? value * static_cast<double>(dim) : value; }
  static BudgetSpec parse(const nlohmann::json& j);
  nlohmann::json to_json() const;
  friend bool operator==(const BudgetSpec&, const BudgetSpec&) = default;
};

struct CompressionSpec {
  codec::Scheme scheme = codec::Scheme::kAlphaShared;
  codec::Rational share = {1, 1};
  std::optional<double> ratio;
  std::optional<BudgetSpec> bit_budget;
  std::size_t bits_per_entry = 5;
  codec::ScalePolicy scale = codec::PerMessageScale{};

  codec::CompressionConfig resolve(std::size_t dim) const;
  friend bool operator==(const CompressionSpec&, const CompressionSpec&) = default;
};

struct RunSpec {
  protocol::Mode mode = protocol::Mode::kDsvgd;
  std::size_t rounds = 100;
  std::size_t unlearn_rounds = 0;
  std::size_t eval_every = 10;
  std::vector<std::size_t> forget;
  std::size_t ece_bins = 10;
  std::uint64_t seed = 1;

  friend bool operator==(const RunSpec&, const RunSpec&) = default;
};

struct OutputSpec {
  std::string dir = "out";
  std::string trace = "trace.csv";
  std::string summary = "summary.json";

  friend bool operator==(const OutputSpec&, const OutputSpec&) = default;
};

struct SweepSpec {
  std::string axis;                 // N_p | R_u | alpha_s | N_b | r
  std::vector<std::string> values;  // textual, e.g. "0.5d", "1/2", "5"

  friend bool operator==(const SweepSpec&, const SweepSpec&) = default;
};

struct ExperimentConfig {
  DatasetSpec dataset;
  std::optional<std::uint64_t> dataset_seed;  // defaults to a value derived from run.seed
  protocol::FederationConfig federation;
  CompressionSpec compression;
  RunSpec run;
  OutputSpec output;
  std::optional<SweepSpec> sweep;

  std::size_t model_dim() const;
  DatasetSpec resolved_dataset() const;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

// Parses text and validates; throws ConfigParseError or ConfigValidationError.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

// Cross-field checks; returns problems with field paths (empty when valid).
std::vector<std::string> validation_problems(const ExperimentConfig& cfg);
void validate(const ExperimentConfig& cfg);

inline const std::vector<std::string> kSweepAxes = {"N_p", "R_u", "alpha_s", "N_b", "r"};

// Copy of cfg with the sweep axis set to `value`.
ExperimentConfig apply_axis(const ExperimentConfig& cfg, const std::string& axis,
                            const std::string& value);

}  // namespace cpfl::cli
