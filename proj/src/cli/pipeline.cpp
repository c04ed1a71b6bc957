/*
 * Copyright 2026 The polyhe Authors.
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

#include "polyhe/cli/pipeline.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "polyhe/errors.hpp"
#include "polyhe/graph/reference.hpp"
#include "polyhe/sim/executor.hpp"
#include "polyhe/sim/planner.hpp"
#include "polyhe/transform/equivalence.hpp"
#include "polyhe/transform/pipeline.hpp"

namespace polyhe {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "tensor files assume a little-endian host");

void PipelineConfig::validate() const {
  for (const auto& m : models) {
    if (!std::filesystem::exists(m)) throw ValidationError("model file not found: " + m.string());
  }
  if (plan && !std::filesystem::exists(*plan)) throw ValidationError("plan file not found: " + plan->string());
  if (input && !std::filesystem::exists(*input)) throw ValidationError("input file not found: " + input->string());
  if (k == 0) throw ValidationError("k must be positive");
  if (members == 0) throw ValidationError("members must be positive");
  if (samples == 0) throw ValidationError("samples must be positive");
  if (log2_delta < 1 || log2_delta > 60) throw ValidationError("log2_delta must lie in [1, 60]");
  if (!preset.empty() && strategy != Strategy::kP2FR && strategy != Strategy::kP2FRT) {
    throw ValidationError(std::string("preset chains use tower reuse; strategy ") + to_string(strategy) +
                          " is incompatible");
  }
}

PipelineConfig config_from_json(const json& j) {
  PipelineConfig c;
  if (j.contains("models")) {
    for (const auto& m : j.at("models")) c.models.emplace_back(m.get<std::string>());
  }
  if (j.contains("plan")) c.plan = j.at("plan").get<std::string>();
  if (j.contains("input")) c.input = j.at("input").get<std::string>();
  if (j.contains("strategy")) c.strategy = strategy_from_string(j.at("strategy").get<std::string>());
  c.k = j.value("k", c.k);
  c.members = j.value("members", c.members);
  c.log2_delta = j.value("log2_delta", c.log2_delta);
  c.preset = j.value("preset", c.preset);
  c.seed = j.value("seed", c.seed);
  c.samples = j.value("samples", c.samples);
  c.equivalence_tol = j.value("equivalence_tol", c.equivalence_tol);
  c.simulation_tol = j.value("simulation_tol", c.simulation_tol);
  return c;
}

json to_json(const PipelineConfig& c) {
  json models = json::array();
  for (const auto& m : c.models) models.push_back(m.string());
  json j = {{"models", models},
            {"strategy", to_string(c.strategy)},
            {"k", c.k},
            {"members", c.members},
            {"log2_delta", c.log2_delta},
            {"preset", c.preset},
            {"seed", c.seed},
            {"samples", c.samples},
            {"equivalence_tol", c.equivalence_tol},
            {"simulation_tol", c.simulation_tol}};
  if (c.plan) j["plan"] = c.plan->string();
  if (c.input) j["input"] = c.input->string();
  return j;
}

Tensor parse_tensor_bytes(const std::string& bytes) {
  const auto nl = bytes.find('\n');
  if (nl == std::string::npos) throw ParseError("tensor file: missing header line");
  json header;
  try {
    header = json::parse(bytes.substr(0, nl));
  } catch (const json::exception& e) {
    throw ParseError(std::string("tensor file header: ") + e.what());
  }
  if (header.value("dtype", "<f8") != "<f8") throw ParseError("tensor file: dtype must be <f8");
  const auto shape = header.at("shape").get<std::vector<std::size_t>>();
  if (shape.size() != 3) throw ParseError("tensor file: shape must be [channels, height, width]");
  Tensor t({shape[0], shape[1], shape[2]});
  const std::size_t payload = bytes.size() - nl - 1;
  if (payload != t.data.size() * sizeof(double)) {
    throw ParseError("tensor file: expected " + std::to_string(t.data.size() * sizeof(double)) +
                     " payload bytes, found " + std::to_string(payload));
  }
  std::memcpy(t.data.data(), bytes.data() + nl + 1, payload);
  return t;
}

std::string tensor_bytes(const Tensor& t) {
  json header = {{"dtype", "<f8"}, {"shape", {t.shape.channels, t.shape.height, t.shape.width}}};
  std::string out = header.dump() + "\n";
  const std::size_t off = out.size();
  out.resize(off + t.data.size() * sizeof(double));
  std::memcpy(out.data() + off, t.data.data(), t.data.size() * sizeof(double));
  return out;
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot open tensor file " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_tensor_bytes(ss.str());
}

void write_tensor_file(const Tensor& t, const std::filesystem::path& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write tensor file " + path.string());
  const std::string bytes = tensor_bytes(t);
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

bool CompareReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

std::string CompareReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed) return c.name;
  }
  return {};
}

json to_json(const CompareReport& r) {
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name},
                      {"passed", c.passed},
                      {"value", c.value},
                      {"tolerance", c.tolerance},
                      {"detail", c.detail}});
  }
  json j = {{"passed", r.passed()}, {"checks", checks}};
  if (!r.passed()) j["first_failure"] = r.first_failure();
  return j;
}

int strategy_sublevels(Strategy s) { return s == Strategy::kP2FRT ? 2 : 1; }

CompareReport compare_model(const ModelGraph& g, const PipelineConfig& cfg, bool corrupt_fused) {
  CompareReport report;
  auto [rewritten, pass] = apply_pipeline(g, cfg.strategy);
  if (corrupt_fused) {
    for (int id : rewritten.topological_order()) {
      Node& n = rewritten.mutable_node(id);
      if (n.kind() == NodeKind::kConv) {
        n.as<ConvNode>().weights[0] *= 1.01;
        break;
      }
    }
  }

  const auto inputs = random_inputs(g, cfg.samples, cfg.seed);
  const auto eq = check_equivalence(g, rewritten, inputs);
  report.checks.push_back({"transform-equivalence", eq.within(cfg.equivalence_tol), eq.max_rel_error,
                           cfg.equivalence_tol,
                           std::to_string(eq.samples) + " inputs, " + std::to_string(eq.argmax_mismatches) +
                               " argmax mismatches"});

  try {
    check_strategy_form(rewritten, cfg.strategy);
    report.checks.push_back({"strategy-form", true, 0, 0, to_string(cfg.strategy)});
  } catch (const StrategyError& e) {
    report.checks.push_back({"strategy-form", false, 0, 0, e.what()});
    return report;
  }

  CompileOptions opts;
  opts.log2_delta = cfg.log2_delta;
  opts.sublevels = strategy_sublevels(cfg.strategy);
  const int expected = analyze_levels(rewritten, cfg.strategy);
  const auto plan = plan_modulus_chain(rewritten, opts);
  report.checks.push_back({"level-table", plan.rescale_count == expected, static_cast<double>(plan.rescale_count),
                           static_cast<double>(expected),
                           "simulated " + std::to_string(plan.rescale_count) + ", analyzer " +
                               std::to_string(expected)});

  const auto prog = compile_circuit({rewritten}, opts);
  double worst = 0.0;
  for (const auto& x : inputs) {
    const auto sim = run_circuit(prog, x);
    worst = std::max(worst, relative_error(reference_eval(rewritten, x), sim.member_outputs[0]));
  }
  report.checks.push_back({"simulation-fidelity", worst <= cfg.simulation_tol, worst, cfg.simulation_tol,
                           "exact moduli, log2 delta " + std::to_string(cfg.log2_delta)});
  return report;
}

}  // namespace polyhe
