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

#include "polyhe/sim/planner.hpp"

#include <bit>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

constexpr int kPlanningLevels = 4096;

}  // namespace

nlohmann::json to_json(const ChainPlanResult& r) {
  nlohmann::json schedule = nlohmann::json::object();
  for (const auto& [node, s] : r.schedule) {
    schedule[std::to_string(node)] = {{"rescales", s.rescales}, {"lambda", s.lambda}, {"level", s.level}};
  }
  return {{"chain", to_json(r.chain)}, {"rescale_count", r.rescale_count}, {"schedule", schedule}};
}

ChainPlanResult plan_modulus_chain(const ModelGraph& g, const CompileOptions& options,
                                   const std::optional<ModulusChainPlan>& preset) {
  CompileOptions opts = options;
  if (preset) {
    opts.log2_delta = preset->log2_delta;
    opts.sublevels = preset->sublevels;
  }
  if (opts.sublevels < 1) throw ValidationError("sublevels must be at least 1");
  const auto probe = make_chain(opts.log2_delta, opts.sublevels, kPlanningLevels);
  const CircuitProgram walk = lower_circuit({g}, probe, opts);

  ChainPlanResult r;
  r.rescale_count = walk.levels_used;
  if (preset) {
    if (preset->rescale_count() < r.rescale_count) {
      throw DepthExhaustedError("preset '" + preset->name + "' has " + std::to_string(preset->rescale_count()) +
                                " rescale moduli, the circuit needs " + std::to_string(r.rescale_count));
    }
    r.chain = *preset;
  } else {
    const int log2_n = std::countr_zero(walk.slots()) + 1;
    r.chain = make_chain(opts.log2_delta, opts.sublevels, r.rescale_count, log2_n);
    r.chain.name = "planned";
  }
  r.schedule = lower_circuit({g}, r.chain, opts).schedule;
  return r;
}

CircuitProgram compile_circuit(const std::vector<ModelGraph>& models, const CompileOptions& options,
                               const std::optional<ModulusChainPlan>& preset) {
  if (models.empty()) throw ValidationError("compile needs at least one model");
  const auto plan = plan_modulus_chain(models[0], options, preset);
  CompileOptions opts = options;
  opts.log2_delta = plan.chain.log2_delta;
  opts.sublevels = plan.chain.sublevels;
  return lower_circuit(models, plan.chain, opts);
}

}  // namespace polyhe
