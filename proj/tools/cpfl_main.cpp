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

// cpfl: compressed particle-based federated learning / unlearning simulator.
//
//   cpfl run      --config exp.json [--out DIR] [--seed N] [--quiet]
//   cpfl sweep    --config exp.json [--axis R_u --values 0.5d,d,5d,10d]
//   cpfl validate --config exp.json

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cpfl/cli/config.hpp"
#include "cpfl/cli/runner.hpp"

namespace {

using namespace cpfl::cli;

struct Common {
  std::string config;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "experiment config (JSON)")->required();
  cmd->add_option("--out", c.out, "output directory (overrides output.dir)");
  cmd->add_option("--seed", c.seed, "run seed (overrides run.seed)");
  cmd->add_flag("--quiet", c.quiet, "suppress progress output");
}

ExperimentConfig load(const Common& c) {
  ExperimentConfig cfg = load_config(c.config);
  if (c.out) cfg.output.dir = *c.out;
  if (c.seed) cfg.run.seed = *c.seed;
  validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compressed particle-based federated Bayesian learning and unlearning simulator"};
  app.require_subcommand(1);

  Common run_opts, sweep_opts, validate_opts;
  auto* run = app.add_subcommand("run", "run one experiment");
  add_common(run, run_opts);
  auto* sweep = app.add_subcommand("sweep", "run one experiment per value of a parameter");
  add_common(sweep, sweep_opts);
  std::string axis;
  std::vector<std::string> values;
  bool values_given = false;
  sweep->add_option("--axis", axis, "parameter to sweep: N_p, R_u, alpha_s, N_b, r");
  sweep->add_option("--values", values, "comma-separated values")->delimiter(',')->each(
      [&](const std::string&) { values_given = true; });
  auto* check = app.add_subcommand("validate", "load and validate a config");
  add_common(check, validate_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kSuccess : kValidation;
  }

  try {
    if (*run) {
      const ExperimentConfig cfg = load(run_opts);
      run_to_files(cfg, run_opts.quiet);
    } else if (*sweep) {
      ExperimentConfig cfg = load(sweep_opts);
      SweepSpec spec = cfg.sweep.value_or(SweepSpec{});
      if (!axis.empty()) spec.axis = axis;
      if (values_given) spec.values = values;
      if (spec.axis.empty()) throw ConfigValidationError({"sweep.axis: no sweep axis given"});
      cfg.sweep = spec;
      validate(cfg);
      const auto cells = run_sweep(cfg, spec, sweep_opts.quiet);
      std::size_t failed = 0;
      for (const auto& c : cells) {
        if (!c.ok) {
          ++failed;
          std::cerr << "cell " << spec.axis << " = " << c.value << " failed: " << c.error << '\n';
        }
      }
      if (failed > 0) return kRuntime;
    } else if (*check) {
      const ExperimentConfig cfg = load(validate_opts);
      if (!validate_opts.quiet)
        std::cout << "ok: d = " << cfg.model_dim() << ", mode = "
                  << cpfl::protocol::mode_name(cfg.run.mode) << '\n';
    }
  } catch (const ConfigParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  } catch (const ConfigValidationError& e) {
    for (const auto& p : e.problems()) std::cerr << "invalid: " << p << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntime;
  }
  return kSuccess;
}
