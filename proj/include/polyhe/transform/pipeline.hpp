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
#include <utility>
#include <vector>

#include "json.hpp"
#include "polyhe/graph/graph.hpp"
#include "polyhe/graph/resnet.hpp"
#include "polyhe/levels/level_analysis.hpp"
#include "polyhe/transform/fusion.hpp"

namespace polyhe {

struct PassReport {
  Strategy strategy = Strategy::kP2;
  std::vector<Rewrite> rewrites;
  std::size_t nodes_removed = 0;
  int depth_before = 0;
  int depth_after = 0;
};

nlohmann::json to_json(const PassReport& report);

/// Runs the strategy's passes: fusing to fixpoint (F), then redistribution of
/// every donor (R). P4 and P2 leave the graph unchanged; P2FRT produces the
/// P2FR graph, tower reuse being a property of the modulus chain.
std::pair<ModelGraph, PassReport> apply_pipeline(const ModelGraph& g, Strategy strategy);

/// Levels of a generated variant under every strategy, using degree-4
/// activations for P4 and degree-2 otherwise.
std::map<Strategy, int> level_table(ResNetVariant variant);

}  // namespace polyhe
