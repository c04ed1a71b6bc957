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

#include <string>
#include <vector>

#include "polyhe/graph/graph.hpp"

namespace polyhe {

enum class Strategy { kP4, kP2, kP2F, kP2R, kP2FR, kP2FRT };

const char* to_string(Strategy s);
/// Accepts "P2FR" as well as "p2fr".
Strategy strategy_from_string(const std::string& name);
const std::vector<Strategy>& all_strategies();

/// Multiplicative levels charged per node. Two-input nodes are charged per
/// incoming edge so that shortcut branches can be costed independently.
struct LevelCostTable {
  int conv = 1;
  int linear = 1;
  int batchnorm = 1;
  int batchnorm_unit = 0;  // slope normalized to one: x + b0
  int avgpool = 1;
  int avgpool_unit = 0;    // divisor normalized to one
  int add_scaled_edge = 1; // Add input carrying a non-unit weight

  /// Depth of a univariate polynomial; defaults to ceil(log2 d) + 1, one less
  /// when monic.
  int poly(int degree, bool monic) const;
  /// Cost of the edge `input_index` of `node`.
  int edge_cost(const Node& node, std::size_t input_index) const;
};

struct CriticalPath {
  int levels = 0;
  std::vector<int> nodes;  // Input .. Output along one longest path
};

/// Longest Input->Output path under the cost table; ties resolve to the
/// producer with the smallest id. No form checks.
CriticalPath critical_path(const ModelGraph& g, const LevelCostTable& table = {});

/// Levels required by `g` under `strategy`. The graph must already be in the
/// strategy's form (e.g. no batch norm for P2F); StrategyError otherwise.
/// P2FRT is ceil(L_P2FR / 2).
int analyze_levels(const ModelGraph& g, Strategy strategy, const LevelCostTable& table = {});

/// Throws StrategyError naming the first node whose form contradicts the
/// strategy.
void check_strategy_form(const ModelGraph& g, Strategy strategy);

}  // namespace polyhe
