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

#include "cpfl/cli/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <ostream>
#include <sstream>

#include "cpfl/core/error.hpp"
#include "cpfl/core/rng.hpp"

namespace cpfl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

json eval_json(const protocol::Evaluation& e) {
  json pc = json::array();
  for (double v : e.per_class_accuracy) pc.push_back(std::isnan(v) ? json(nullptr) : json(v));
  return {{"accuracy", e.accuracy}, {"ece", e.ece}, {"per_class_accuracy", pc}};
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

RunOutput execute(const ExperimentConfig& cfg) {
  validate(cfg);
  RunOutput out;
  out.data = generate_dataset(cfg.resolved_dataset());
  protocol::ExperimentPlan plan;
  plan.mode = cfg.run.mode;
  plan.rounds = cfg.run.rounds;
  plan.unlearn_rounds = cfg.run.unlearn_rounds;
  plan.eval_every = cfg.run.eval_every;
  plan.forget = cfg.run.forget;
  plan.ece_bins = cfg.run.ece_bins;
  out.result = protocol::run_experiment(out.data, plan, cfg.federation,
                                        cfg.compression.resolve(out.data.model.dim()), cfg.run.seed);
  return out;
}

void write_trace_csv(std::ostream& os, const RunOutput& run) {
  const std::size_t classes = run.data.model.num_classes;
  os << "round,phase,agent,bits,cum_bits,accuracy,ece";
  for (std::size_t c = 0; c < classes; ++c) os << ",acc_class_" << c;
  os << '\n';
  for (const auto& pr : run.result.records) {
    const auto& r = pr.record;
    os << r.round << ',' << (pr.phase == protocol::Phase::kLearn ? "learn" : "unlearn") << ','
       << r.agent << ',' << r.bits << ',' << r.cumulative_bits << ',';
    if (r.accuracy) os << fmt(*r.accuracy);
    os << ',';
    if (r.ece) os << fmt(*r.ece);
    for (std::size_t c = 0; c < classes; ++c) {
      os << ',';
      if (c < r.per_class_accuracy.size() && !std::isnan(r.per_class_accuracy[c]))
        os << fmt(r.per_class_accuracy[c]);
    }
    os << '\n';
  }
}

json summary_json(const ExperimentConfig& cfg, const RunOutput& run) {
  const auto& res = run.result;
  const std::size_t rounds = res.records.size();
  json s = {
      {"config", config_to_json(cfg)},
      {"seed", cfg.run.seed},
      {"dataset_seed", cfg.resolved_dataset().seed},
      {"mode", protocol::mode_name(cfg.run.mode)},
      {"dim", res.dim},
      {"particles", res.num_particles},
      {"k", res.k},
      {"rounds", rounds},
      {"total_bits", res.total_bits},
      {"bits_per_round", rounds == 0 ? 0.0 : static_cast<double>(res.total_bits) / static_cast<double>(rounds)},
      {"initial", eval_json(res.initial)},
      {"final", eval_json(res.final_eval)},
  };
  if (res.before_unlearning) s["before_unlearning"] = eval_json(*res.before_unlearning);
  if (!res.forgotten_classes.empty()) {
    s["forgotten_classes"] = res.forgotten_classes;
    s["retained_classes"] = res.retained_classes;
    auto group = [&](const protocol::Evaluation& e) {
      return json{{"forgotten", protocol::mean_class_accuracy(e.per_class_accuracy, res.forgotten_classes)},
                  {"retained", protocol::mean_class_accuracy(e.per_class_accuracy, res.retained_classes)}};
    };
    s["final_by_group"] = group(res.final_eval);
    if (res.before_unlearning) s["before_unlearning_by_group"] = group(*res.before_unlearning);
  }
  return s;
}

RunOutput run_to_files(const ExperimentConfig& cfg, bool quiet) {
  RunOutput run = execute(cfg);
  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  write_trace_csv(csv, run);
  write_file(dir / cfg.output.trace, csv.str());
  write_file(dir / cfg.output.summary, summary_json(cfg, run).dump(2) + "\n");
  if (!quiet) {
    std::cerr << protocol::mode_name(cfg.run.mode) << ": " << run.result.records.size()
              << " rounds, k = " << run.result.k << ", " << run.result.total_bits
              << " uplink bits, final accuracy " << fmt(run.result.final_eval.accuracy) << ", ECE "
              << fmt(run.result.final_eval.ece) << " -> " << (dir / cfg.output.trace).string() << '\n';
  }
  return run;
}

ExperimentConfig sweep_cell_config(const ExperimentConfig& cfg, const SweepSpec& sweep,
                                   std::size_t index) {
  ExperimentConfig c = apply_axis(cfg, sweep.axis, sweep.values.at(index));
  c.dataset_seed = cfg.resolved_dataset().seed;
  c.run.seed = derive_seed(cfg.run.seed, 0x5eed, index);
  c.output.dir = (fs::path(cfg.output.dir) / ("cell_" + std::to_string(index))).string();
  c.sweep.reset();
  return c;
}

std::vector<SweepCell> run_sweep(const ExperimentConfig& cfg, const SweepSpec& sweep, bool quiet) {
  const std::size_t n = sweep.values.size();
  std::vector<SweepCell> cells(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(n); ++i) {
    auto& cell = cells[static_cast<std::size_t>(i)];
    cell.value = sweep.values[static_cast<std::size_t>(i)];
    try {
      const ExperimentConfig c = sweep_cell_config(cfg, sweep, static_cast<std::size_t>(i));
      const RunOutput run = run_to_files(c, quiet);
      cell.summary = summary_json(c, run);
      cell.ok = true;
    } catch (const std::exception& e) {
      cell.error = e.what();
    }
  }

  const fs::path dir(cfg.output.dir);
  fs::create_directories(dir);
  std::ostringstream csv;
  csv << "axis,value,status,seed,k,total_bits,accuracy,ece\n";
  json table = json::array();
  for (std::size_t i = 0; i < n; ++i) {
    const auto& cell = cells[i];
    csv << sweep.axis << ',' << cell.value << ',' << (cell.ok ? "ok" : "failed");
    json row = {{"axis", sweep.axis}, {"value", cell.value}, {"ok", cell.ok}};
    if (cell.ok) {
      const auto& s = cell.summary;
      csv << ',' << s["seed"].get<std::uint64_t>() << ',' << s["k"].get<std::size_t>() << ','
          << s["total_bits"].get<std::uint64_t>() << ',' << fmt(s["final"]["accuracy"].get<double>())
          << ',' << fmt(s["final"]["ece"].get<double>());
      row["summary"] = s;
    } else {
      csv << ",,,,,";
      row["error"] = cell.error;
    }
    csv << '\n';
    table.push_back(row);
  }
  write_file(dir / "sweep_summary.csv", csv.str());
  write_file(dir / "sweep_summary.json",
             json{{"axis", sweep.axis}, {"values", sweep.values}, {"cells", table}}.dump(2) + "\n");
  return cells;
}

}  // namespace cpfl::cli
