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

#include "cpfl/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "cpfl/codec/accounting.hpp"
#include "cpfl/core/error.hpp"
#include "cpfl/core/rng.hpp"

namespace cpfl::cli {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& p : v) s += (s.empty() ? "" : "; ") + p;
  return s;
}

// Collects problems while walking a JSON object.
class Reader {
 public:
  explicit Reader(std::vector<std::string>& problems) : problems_(problems) {}

  void problem(const std::string& path, const std::string& what) {
    problems_.push_back(path + ": " + what);
  }

  const json* section(const json& root, const std::string& key,
                      std::initializer_list<const char*> allowed) {
    if (!root.contains(key)) return nullptr;
    const json& s = root.at(key);
    if (!s.is_object()) {
      problem(key, "must be an object");
      return nullptr;
    }
    check_keys(s, key, allowed);
    return &s;
  }

  void check_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [k, _] : obj.items()) {
      if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
        problem(path + "." + k, "unknown field");
    }
  }

  void uint(const json* obj, const char* key, const std::string& path, std::size_t& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_number_unsigned()) return problem(path + "." + key, "expected a non-negative integer");
    out = v.get<std::size_t>();
  }

  void u64(const json* obj, const char* key, const std::string& path, std::uint64_t& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_number_unsigned()) return problem(path + "." + key, "expected a non-negative integer");
    out = v.get<std::uint64_t>();
  }

  void real(const json* obj, const char* key, const std::string& path, double& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_number()) return problem(path + "." + key, "expected a number");
    out = v.get<double>();
  }

  void boolean(const json* obj, const char* key, const std::string& path, bool& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_boolean()) return problem(path + "." + key, "expected true or false");
    out = v.get<bool>();
  }

  void string(const json* obj, const char* key, const std::string& path, std::string& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_string()) return problem(path + "." + key, "expected a string");
    out = v.get<std::string>();
  }

  void uint_list(const json* obj, const char* key, const std::string& path,
                 std::vector<std::size_t>& out) {
    if (!obj || !obj->contains(key)) return;
    const json& v = obj->at(key);
    if (!v.is_array()) return problem(path + "." + key, "expected a list of integers");
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number_unsigned()) return problem(path + "." + key, "expected a list of integers");
      out.push_back(e.get<std::size_t>());
    }
  }

 private:
  std::vector<std::string>& problems_;
};

std::string number_text(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

ConfigValidationError::ConfigValidationError(std::vector<std::string> problems)
    : std::runtime_error("invalid configuration: " + join(problems)),
      problems_(std::move(problems)) {}

BudgetSpec BudgetSpec::parse(const json& j) {
  if (j.is_number()) return {j.get<double>(), false};
  if (!j.is_string()) throw ConfigError("expected a number of bits or a multiple of d such as \"0.5d\"");
  std::string s = j.get<std::string>();
  if (s.empty() || s.back() != 'd') {
    try {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used == s.size()) return {v, false};
    } catch (const std::exception&) {
    }
    throw ConfigError("cannot parse bit budget '" + s + "'");
  }
  s.pop_back();
  if (s.empty()) return {1.0, true};
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used == s.size()) return {v, true};
  } catch (const std::exception&) {
  }
  throw ConfigError("cannot parse bit budget '" + j.get<std::string>() + "'");
}

json BudgetSpec::to_json() const {
  if (!times_dim) return value;
  return number_text(value) + "d";
}

codec::CompressionConfig CompressionSpec::resolve(std::size_t dim) const {
  codec::CompressionConfig c;
  c.scheme = scheme;
  c.share = share;
  c.ratio = ratio;
  if (bit_budget) c.bit_budget = bit_budget->resolve(dim);
  c.bits_per_entry = bits_per_entry;
  c.scale = scale;
  return c;
}

std::size_t ExperimentConfig::model_dim() const {
  const std::size_t width = dataset.feature_map.width == 0 ? dataset.feature_dim : dataset.feature_map.width;
  return dataset.num_classes * (width + 1);
}

DatasetSpec ExperimentConfig::resolved_dataset() const {
  DatasetSpec d = dataset;
  d.seed = dataset_seed.value_or(derive_seed(run.seed, 0xda7a));
  return d;
}

ExperimentConfig config_from_json(const json& root) {
  std::vector<std::string> problems;
  Reader rd(problems);
  ExperimentConfig cfg;
  if (!root.is_object()) throw ConfigValidationError({"<root>: must be an object"});
  rd.check_keys(root, "<root>", {"dataset", "federation", "compression", "run", "output", "sweep"});

  if (const json* d = rd.section(root, "dataset",
                                 {"generator", "num_classes", "feature_dim", "agents", "agent_size",
                                  "agent_sizes", "test_size", "agent_classes", "separation", "noise",
                                  "hidden_width", "hidden_gain", "seed"})) {
    auto& ds = cfg.dataset;
    std::string gen = "blobs";
    rd.string(d, "generator", "dataset", gen);
    if (gen == "blobs")
      ds.generator = Generator::kBlobs;
    else if (gen == "class-partition" || gen == "two-class-per-agent")
      ds.generator = Generator::kClassPartition;
    else
      rd.problem("dataset.generator", "unknown generator '" + gen + "'");
    rd.uint(d, "num_classes", "dataset", ds.num_classes);
    rd.uint(d, "feature_dim", "dataset", ds.feature_dim);
    if (d->contains("agent_sizes")) {
      if (d->contains("agents") || d->contains("agent_size"))
        rd.problem("dataset.agent_sizes", "give either agent_sizes or agents/agent_size, not both");
      rd.uint_list(d, "agent_sizes", "dataset", ds.agent_sizes);
    } else {
      std::size_t agents = 1, size = 200;
      rd.uint(d, "agents", "dataset", agents);
      rd.uint(d, "agent_size", "dataset", size);
      ds.agent_sizes.assign(agents, size);
    }
    rd.uint(d, "test_size", "dataset", ds.test_size);
    if (d->contains("agent_classes")) {
      const json& ac = d->at("agent_classes");
      if (!ac.is_array()) {
        rd.problem("dataset.agent_classes", "expected a list of class lists");
      } else {
        for (std::size_t a = 0; a < ac.size(); ++a) {
          std::vector<std::size_t> cls;
          json wrap = {{"c", ac[a]}};
          rd.uint_list(&wrap, "c", "dataset.agent_classes[" + std::to_string(a) + "]", cls);
          ds.agent_classes.push_back(cls);
        }
      }
    }
    rd.real(d, "separation", "dataset", ds.separation);
    rd.real(d, "noise", "dataset", ds.noise);
    rd.uint(d, "hidden_width", "dataset", ds.feature_map.width);
    rd.real(d, "hidden_gain", "dataset", ds.feature_map.gain);
    if (d->contains("seed")) {
      std::uint64_t s = 0;
      rd.u64(d, "seed", "dataset", s);
      cfg.dataset_seed = s;
    }
  }

  if (const json* f = rd.section(root, "federation",
                                 {"particles", "local_steps", "distill_steps", "temperature",
                                  "prior_variance", "step_size", "kde_bandwidth", "svgd_bandwidth",
                                  "bandwidth_floor", "weight_by_shard_size", "scheduler"})) {
    auto& fc = cfg.federation;
    rd.uint(f, "particles", "federation", fc.num_particles);
    rd.uint(f, "local_steps", "federation", fc.local_steps);
    if (f->contains("distill_steps")) {
      std::size_t ds = 0;
      rd.uint(f, "distill_steps", "federation", ds);
      fc.distill_steps = ds;
    }
    rd.real(f, "temperature", "federation", fc.temperature);
    rd.real(f, "prior_variance", "federation", fc.prior.variance);
    rd.real(f, "step_size", "federation", fc.step_size);
    rd.real(f, "kde_bandwidth", "federation", fc.kernels.kde_bandwidth);
    rd.real(f, "bandwidth_floor", "federation", fc.kernels.bandwidth_floor);
    if (f->contains("svgd_bandwidth")) {
      const json& b = f->at("svgd_bandwidth");
      if (b.is_string() && b.get<std::string>() == "median")
        fc.kernels.svgd_bandwidth = svgd::MedianHeuristic{};
      else if (b.is_number())
        fc.kernels.svgd_bandwidth = svgd::FixedBandwidth{b.get<double>()};
      else
        rd.problem("federation.svgd_bandwidth", "expected \"median\" or a positive number");
    }
    rd.boolean(f, "weight_by_shard_size", "federation", fc.weight_by_shard_size);
    std::string sched = "round-robin";
    rd.string(f, "scheduler", "federation", sched);
    if (sched == "round-robin")
      fc.scheduler = protocol::Scheduler::kRoundRobin;
    else if (sched == "uniform")
      fc.scheduler = protocol::Scheduler::kUniform;
    else
      rd.problem("federation.scheduler", "expected \"round-robin\" or \"uniform\"");
  }

  if (const json* c = rd.section(root, "compression",
                                 {"scheme", "share", "ratio", "bit_budget", "bits_per_entry", "a_max"})) {
    auto& cs = cfg.compression;
    std::string scheme = codec::scheme_name(cs.scheme);
    rd.string(c, "scheme", "compression", scheme);
    try {
      cs.scheme = codec::parse_scheme(scheme);
    } catch (const ConfigError& e) {
      rd.problem("compression.scheme", e.what());
    }
    if (c->contains("share")) {
      const json& s = c->at("share");
      try {
        if (s.is_string())
          cs.share = codec::Rational::parse(s.get<std::string>());
        else if (s.is_number())
          cs.share = codec::Rational::parse(number_text(s.get<double>()));
        else
          rd.problem("compression.share", "expected a fraction such as \"1/2\"");
      } catch (const ConfigError& e) {
        rd.problem("compression.share", e.what());
      }
    }
    if (c->contains("ratio")) {
      double r = 0.0;
      rd.real(c, "ratio", "compression", r);
      cs.ratio = r;
    }
    if (c->contains("bit_budget")) {
      try {
        cs.bit_budget = BudgetSpec::parse(c->at("bit_budget"));
      } catch (const ConfigError& e) {
        rd.problem("compression.bit_budget", e.what());
      }
    }
    rd.uint(c, "bits_per_entry", "compression", cs.bits_per_entry);
    if (c->contains("a_max")) {
      const json& a = c->at("a_max");
      if (a.is_string() && a.get<std::string>() == "per-message")
        cs.scale = codec::PerMessageScale{};
      else if (a.is_number())
        cs.scale = codec::FixedScale{a.get<double>()};
      else
        rd.problem("compression.a_max", "expected \"per-message\" or a positive number");
    }
  }

  if (const json* r = rd.section(root, "run", {"mode", "rounds", "unlearn_rounds", "eval_every",
                                               "forget", "ece_bins", "seed"})) {
    auto& rs = cfg.run;
    std::string mode = protocol::mode_name(rs.mode);
    rd.string(r, "mode", "run", mode);
    try {
      rs.mode = protocol::parse_mode(mode);
    } catch (const ConfigError& e) {
      rd.problem("run.mode", e.what());
    }
    rd.uint(r, "rounds", "run", rs.rounds);
    rd.uint(r, "unlearn_rounds", "run", rs.unlearn_rounds);
    rd.uint(r, "eval_every", "run", rs.eval_every);
    rd.uint_list(r, "forget", "run", rs.forget);
    rd.uint(r, "ece_bins", "run", rs.ece_bins);
    rd.u64(r, "seed", "run", rs.seed);
  }

  if (const json* o = rd.section(root, "output", {"dir", "trace", "summary"})) {
    rd.string(o, "dir", "output", cfg.output.dir);
    rd.string(o, "trace", "output", cfg.output.trace);
    rd.string(o, "summary", "output", cfg.output.summary);
  }

  if (const json* s = rd.section(root, "sweep", {"axis", "values"})) {
    SweepSpec sw;
    rd.string(s, "axis", "sweep", sw.axis);
    if (s->contains("values")) {
      const json& v = s->at("values");
      if (!v.is_array()) {
        rd.problem("sweep.values", "expected a list");
      } else {
        for (const auto& e : v) {
          if (e.is_string())
            sw.values.push_back(e.get<std::string>());
          else if (e.is_number())
            sw.values.push_back(e.is_number_integer() ? std::to_string(e.get<long long>())
                                                      : number_text(e.get<double>()));
          else
            rd.problem("sweep.values", "entries must be numbers or strings");
        }
      }
    }
    cfg.sweep = sw;
  }

  if (!problems.empty()) throw ConfigValidationError(problems);
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  const auto& ds = cfg.dataset;
  j["dataset"] = {
      {"generator", ds.generator == Generator::kBlobs ? "blobs" : "class-partition"},
      {"num_classes", ds.num_classes},
      {"feature_dim", ds.feature_dim},
      {"agent_sizes", ds.agent_sizes},
      {"test_size", ds.test_size},
      {"separation", ds.separation},
      {"noise", ds.noise},
      {"hidden_width", ds.feature_map.width},
      {"hidden_gain", ds.feature_map.gain},
  };
  if (!ds.agent_classes.empty()) j["dataset"]["agent_classes"] = ds.agent_classes;
  if (cfg.dataset_seed) j["dataset"]["seed"] = *cfg.dataset_seed;

  const auto& fc = cfg.federation;
  json bw = "median";
  if (const auto* f = std::get_if<svgd::FixedBandwidth>(&fc.kernels.svgd_bandwidth)) bw = f->h;
  j["federation"] = {
      {"particles", fc.num_particles},
      {"local_steps", fc.local_steps},
      {"temperature", fc.temperature},
      {"prior_variance", fc.prior.variance},
      {"step_size", fc.step_size},
      {"kde_bandwidth", fc.kernels.kde_bandwidth},
      {"svgd_bandwidth", bw},
      {"bandwidth_floor", fc.kernels.bandwidth_floor},
      {"weight_by_shard_size", fc.weight_by_shard_size},
      {"scheduler", fc.scheduler == protocol::Scheduler::kRoundRobin ? "round-robin" : "uniform"},
  };
  if (fc.distill_steps) j["federation"]["distill_steps"] = *fc.distill_steps;

  const auto& cs = cfg.compression;
  j["compression"] = {
      {"scheme", codec::scheme_name(cs.scheme)},
      {"share", cs.share.str()},
      {"bits_per_entry", cs.bits_per_entry},
  };
  if (cs.ratio) j["compression"]["ratio"] = *cs.ratio;
  if (cs.bit_budget) j["compression"]["bit_budget"] = cs.bit_budget->to_json();
  if (const auto* f = std::get_if<codec::FixedScale>(&cs.scale))
    j["compression"]["a_max"] = f->a_max;
  else
    j["compression"]["a_max"] = "per-message";

  const auto& rs = cfg.run;
  j["run"] = {
      {"mode", protocol::mode_name(rs.mode)},
      {"rounds", rs.rounds},
      {"unlearn_rounds", rs.unlearn_rounds},
      {"eval_every", rs.eval_every},
      {"forget", rs.forget},
      {"ece_bins", rs.ece_bins},
      {"seed", rs.seed},
  };
  j["output"] = {{"dir", cfg.output.dir}, {"trace", cfg.output.trace}, {"summary", cfg.output.summary}};
  if (cfg.sweep) j["sweep"] = {{"axis", cfg.sweep->axis}, {"values", cfg.sweep->values}};
  return j;
}

std::vector<std::string> validation_problems(const ExperimentConfig& cfg) {
  std::vector<std::string> p;
  auto add = [&](const std::string& path, const std::string& what) { p.push_back(path + ": " + what); };

  const auto& ds = cfg.dataset;
  if (ds.num_classes < 2) add("dataset.num_classes", "must be at least 2");
  if (ds.feature_dim < 1) add("dataset.feature_dim", "must be at least 1");
  if (ds.agent_sizes.empty()) add("dataset.agent_sizes", "need at least one agent");
  for (std::size_t a = 0; a < ds.agent_sizes.size(); ++a)
    if (ds.agent_sizes[a] < 1) add("dataset.agent_sizes[" + std::to_string(a) + "]", "must be at least 1");
  if (ds.test_size < 1) add("dataset.test_size", "must be at least 1");
  if (!(ds.noise > 0.0)) add("dataset.noise", "must be positive");
  if (!(ds.feature_map.gain > 0.0)) add("dataset.hidden_gain", "must be positive");
  if (!ds.agent_classes.empty()) {
    if (ds.agent_classes.size() != ds.agent_sizes.size())
      add("dataset.agent_classes", "needs one class list per agent");
    for (std::size_t a = 0; a < ds.agent_classes.size(); ++a) {
      const std::string path = "dataset.agent_classes[" + std::to_string(a) + "]";
      if (ds.agent_classes[a].empty()) add(path, "must name at least one class");
      for (std::size_t c : ds.agent_classes[a])
        if (c >= ds.num_classes) add(path, "class " + std::to_string(c) + " out of range");
    }
  }

  const auto& fc = cfg.federation;
  if (fc.num_particles < 1) add("federation.particles", "must be at least 1");
  if (fc.local_steps < 1) add("federation.local_steps", "must be at least 1");
  if (!(fc.temperature > 0.0)) add("federation.temperature", "must be positive");
  if (!(fc.prior.variance > 0.0)) add("federation.prior_variance", "must be positive");
  if (!(fc.step_size > 0.0)) add("federation.step_size", "must be positive");
  if (!(fc.kernels.kde_bandwidth > 0.0)) add("federation.kde_bandwidth", "must be positive");
  if (!(fc.kernels.bandwidth_floor > 0.0)) add("federation.bandwidth_floor", "must be positive");
  if (const auto* f = std::get_if<svgd::FixedBandwidth>(&fc.kernels.svgd_bandwidth); f && !(f->h > 0.0))
    add("federation.svgd_bandwidth", "must be positive");

  const auto& rs = cfg.run;
  const bool fedavg = rs.mode == protocol::Mode::kFedAvg;
  const auto& cs = cfg.compression;
  if (cs.ratio.has_value() == cs.bit_budget.has_value())
    add("compression", "exactly one of ratio and bit_budget must be set");
  if (cs.bits_per_entry < 2 || cs.bits_per_entry > 32) add("compression.bits_per_entry", "must be in [2, 32]");
  if (const auto* f = std::get_if<codec::FixedScale>(&cs.scale); f && !(f->a_max > 0.0))
    add("compression.a_max", "must be positive");
  if (cs.bit_budget && !(cs.bit_budget->value > 0.0)) add("compression.bit_budget", "must be positive");
  if (cs.ratio && !(*cs.ratio > 0.0 && *cs.ratio <= 1.0)) add("compression.ratio", "must lie in (0, 1]");

  const std::size_t np = fedavg ? 1 : fc.num_particles;
  if (!fedavg && cs.scheme == codec::Scheme::kAlphaShared && np >= 1) {
    const auto& a = cs.share;
    if (a.den % a.num != 0 || np % (a.den / a.num) != 0 || a.den / a.num > np)
      add("compression.share", "alpha_s = " + a.str() + " is not admissible: 1/alpha_s must be an integer dividing N_p = " +
                                   std::to_string(np));
  }
  if (p.empty() && np >= 1 && ds.num_classes >= 1) {
    codec::CompressionConfig cc = cs.resolve(cfg.model_dim());
    if (fedavg) cc.scheme = codec::Scheme::kPerParticle;
    try {
      codec::resolve_k(cc, np, cfg.model_dim());
    } catch (const ConfigError& e) {
      add(cs.bit_budget ? "compression.bit_budget" : "compression.ratio", e.what());
    }
  }

  const bool needs_forget = rs.mode == protocol::Mode::kForget || rs.mode == protocol::Mode::kScratch;
  if (needs_forget) {
    try {
      protocol::UnlearnRequest{rs.forget}.validate(ds.agent_sizes.size());
    } catch (const ConfigError& e) {
      add("run.forget", e.what());
    }
  } else if (!rs.forget.empty()) {
    add("run.forget", "only meaningful for modes forget and scratch");
  }
  if (rs.mode == protocol::Mode::kForget && rs.unlearn_rounds == 0)
    add("run.unlearn_rounds", "mode forget needs at least one unlearning round");
  if (rs.eval_every < 1) add("run.eval_every", "must be at least 1");
  if (rs.ece_bins < 1) add("run.ece_bins", "must be at least 1");

  if (cfg.sweep) {
    if (std::find(kSweepAxes.begin(), kSweepAxes.end(), cfg.sweep->axis) == kSweepAxes.end())
      add("sweep.axis", "must be one of N_p, R_u, alpha_s, N_b, r");
  }
  return p;
}

void validate(const ExperimentConfig& cfg) {
  auto p = validation_problems(cfg);
  if (!p.empty()) throw ConfigValidationError(std::move(p));
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError(e.what());
  }
  ExperimentConfig cfg = config_from_json(j);
  validate(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigParseError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

ExperimentConfig apply_axis(const ExperimentConfig& cfg, const std::string& axis,
                            const std::string& value) {
  ExperimentConfig c = cfg;
  try {
    if (axis == "N_p") {
      c.federation.num_particles = static_cast<std::size_t>(std::stoul(value));
    } else if (axis == "R_u") {
      c.compression.bit_budget = BudgetSpec::parse(json(value));
      c.compression.ratio.reset();
    } else if (axis == "alpha_s") {
      c.compression.scheme = codec::Scheme::kAlphaShared;
      c.compression.share = codec::Rational::parse(value);
    } else if (axis == "N_b") {
      c.compression.bits_per_entry = static_cast<std::size_t>(std::stoul(value));
    } else if (axis == "r") {
      c.compression.ratio = std::stod(value);
      c.compression.bit_budget.reset();
    } else {
      throw ConfigValidationError({"sweep.axis: unknown axis '" + axis + "'"});
    }
  } catch (const std::logic_error&) {
    throw ConfigValidationError({"sweep.values: cannot apply '" + value + "' to axis " + axis});
  }
  return c;
}

}  // namespace cpfl::cli
