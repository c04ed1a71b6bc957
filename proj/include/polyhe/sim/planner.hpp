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

#pragma once

#include <map>
#include <optional>
#include <vector>

#include "json.hpp"
#include "polyhe/graph/graph.hpp"
#include "polyhe/levels/modulus_chain.hpp"
#include "polyhe/sim/lowering.hpp"

namespace polyhe {

struct ChainPlanResult {
  ModulusChainPlan chain;
  /// Rescale moduli the walk needs; equals chain.rescale_count() unless a
  /// preset supplies more.
  int rescale_count = 0;
  std::map<int, NodeSchedule> schedule;
};

nlohmann::json to_json(const ChainPlanResult& r);

/// Walks the graph in topological order with the lowering's sublevel rules
/// and counts the rescale moduli the deepest output consumes. With a preset,
/// its scale and sublevels are used and DepthExhaustedError is raised when it
/// holds fewer moduli than needed; otherwise a chain of exactly that many
/// l * log2(Delta)-bit moduli is built.
ChainPlanResult plan_modulus_chain(const ModelGraph& g, const CompileOptions& options,
                                   const std::optional<ModulusChainPlan>& preset = std::nullopt);

/// Plans on the first model, then lowers all of them against the plan.
CircuitProgram compile_circuit(const std::vector<ModelGraph>& models, const CompileOptions& options,
                               const std::optional<ModulusChainPlan>& preset = std::nullopt);

}  // namespace polyhe
