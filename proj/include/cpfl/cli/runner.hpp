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

#include <iosfwd>
#include <string>
#include <vector>

#include "cpfl/cli/config.hpp"
#include "cpfl/protocol/experiment.hpp"

namespace cpfl::cli {

// Unreadable or malformed config files count as validation failures.
enum ExitCode : int { kSuccess = 0, kValidation = 1, kRuntime = 2 };

struct RunOutput {
  Dataset data;
  protocol::ExperimentResult result;
};

RunOutput execute(const ExperimentConfig& cfg);

// Columns: round,phase,agent,bits,cum_bits,accuracy,ece,acc_class_0..acc_class_{C-1}.
// Metric cells are empty on rounds without an evaluation.
void write_trace_csv(std::ostream& os, const RunOutput& run);
nlohmann::json summary_json(const ExperimentConfig& cfg, const RunOutput& run);

// Runs one experiment and writes <out>/<trace> and <out>/<summary>.
RunOutput run_to_files(const ExperimentConfig& cfg, bool quiet);

struct SweepCell {
  std::string value;
  bool ok = false;
  std::string error;
  nlohmann::json summary;
};

// One run per value with derived sub-seeds, written under <out>/cell_<i>/,
// plus <out>/sweep_summary.csv and <out>/sweep_summary.json.
std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep, bool quiet);

// Config for sweep cell `index`: the axis value applied, run.seed replaced by
// a derived sub-seed, dataset seed pinned to the parent's.
ExperimentConfig sweep_cell_config(const ExperimentConfig& cfg, const SweepSpec& sweep,
                                   std::size_t index);

}  // namespace cpfl::cli
