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

#include "cpfl/protocol/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "cpfl/core/error.hpp"

namespace cpfl::protocol {

const char* mode_name(Mode m) {
  switch (m) {
    case Mode::kDsvgd: return "dsvgd";
    case Mode::kForget: return "forget";
    case Mode::kFedAvg: return "fedavg";
    case Mode::kScratch: return "scratch";
  }
  return "?";
}

Mode parse_mode(const std::string& name) {
  if (name == "dsvgd") return Mode::kDsvgd;
  if (name == "forget") return Mode::kForget;
  if (name == "fedavg") return Mode::kFedAvg;
  if (name == "scratch") return Mode::kScratch;
  throw ConfigError("unknown mode '" + name + "'");
}

Evaluation evaluate(const ParticleSet& particles, const AgentShard& test, const ModelSpec& model,
                    std::size_t ece_bins) {
  const auto preds = predict(particles, test, model);
  Evaluation e;
  std::size_t hits = 0;
  std::vector<std::size_t> class_hits(model.num_classes, 0), class_total(model.num_classes, 0);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    hits += preds[i].correct ? 1 : 0;
    const std::size_t y = test.examples[i].label;
    ++class_total[y];
    class_hits[y] += preds[i].correct ? 1 : 0;
  }
  e.accuracy = static_cast<double>(hits) / static_cast<double>(preds.size());
  e.ece = expected_calibration_error(preds, ece_bins).ece;
  e.per_class_accuracy.assign(model.num_classes, std::nan(""));
  for (std::size_t c = 0; c < model.num_classes; ++c)
    if (class_total[c] > 0)
      e.per_class_accuracy[c] = static_cast<double>(class_hits[c]) / static_cast<double>(class_total[c]);
  return e;
}

double mean_class_accuracy(const Vector& per_class, const std::vector<std::size_t>& classes) {
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t c : classes) {
    if (c < per_class.size() && !std::isnan(per_class[c])) {
      s += per_class[c];
      ++n;
    }
  }
  return n == 0 ? std::nan("") : s / static_cast<double>(n);
}

namespace {

void split_classes(const Dataset& data, const std::vector<std::size_t>& forget,
                   ExperimentResult& out) {
  std::set<std::size_t> forgotten, retained;
  for (std::size_t a = 0; a < data.agents.size(); ++a) {
    const bool f = std::find(forget.begin(), forget.end(), a) != forget.end();
    for (const auto& ex : data.agents[a].examples) (f ? forgotten : retained).insert(ex.label);
  }
  for (std::size_t c = 0; c < data.model.num_classes; ++c) {
    if (forgotten.count(c) && !retained.count(c))
      out.forgotten_classes.push_back(c);
    else
      out.retained_classes.push_back(c);
  }
}

bool due(std::size_t round, std::size_t last, std::size_t every) {
  return round == last || (every > 0 && round % every == 0);
}

}  // namespace

ExperimentResult run_experiment(const Dataset& data, const ExperimentPlan& plan,
                                const FederationConfig& federation,
                                const codec::CompressionConfig& compression, std::uint64_t seed) {
  ExperimentResult out;
  const bool needs_forget = plan.mode == Mode::kForget || plan.mode == Mode::kScratch;
  UnlearnRequest request{plan.forget};
  if (needs_forget) request.validate(data.agents.size());
  split_classes(data, plan.forget, out);

  FederationConfig cfg = federation;
  cfg.algorithm = plan.mode == Mode::kFedAvg ? Algorithm::kFedAvg : Algorithm::kDsvgd;

  std::vector<AgentShard> shards;
  for (std::size_t a = 0; a < data.agents.size(); ++a) {
    const bool forgetting =
        std::find(plan.forget.begin(), plan.forget.end(), a) != plan.forget.end();
    if (plan.mode == Mode::kScratch && forgetting) continue;
    shards.push_back(data.agents[a]);
  }

  FederationState state = init_learning(data.model, std::move(shards), cfg, compression, seed);
  out.k = state.k;
  out.num_particles = state.config.num_particles;
  out.dim = data.model.dim();
  out.initial = evaluate(state.global_particles, data.test, data.model, plan.ece_bins);
  out.final_eval = out.initial;

  auto record = [&](Phase phase, RoundRecord rec, std::size_t index, std::size_t last) {
    if (due(index, last, plan.eval_every)) {
      const Evaluation e = evaluate(state.global_particles, data.test, data.model, plan.ece_bins);
      rec.accuracy = e.accuracy;
      rec.ece = e.ece;
      rec.per_class_accuracy = e.per_class_accuracy;
      out.final_eval = e;
    }
    out.records.push_back({phase, std::move(rec)});
  };

  for (std::size_t i = 1; i <= plan.rounds; ++i) {
    RoundRecord rec = cfg.algorithm == Algorithm::kFedAvg ? run_fedavg_round(state)
                                                          : run_learning_round(state);
    record(Phase::kLearn, std::move(rec), i, plan.rounds);
  }

  if (plan.mode == Mode::kForget) {
    out.before_unlearning = out.final_eval;
    begin_unlearning(state, request);
    for (std::size_t i = 1; i <= plan.unlearn_rounds; ++i)
      record(Phase::kUnlearn, run_unlearning_round(state, request), i, plan.unlearn_rounds);
  }
  out.total_bits = state.cumulative_bits;
  return out;
}

}  // namespace cpfl::protocol
