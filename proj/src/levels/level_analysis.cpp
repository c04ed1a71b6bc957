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

#include "polyhe/levels/level_analysis.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "polyhe/errors.hpp"
#include "polyhe/poly/fixed_point_poly.hpp"

namespace polyhe {

namespace {

constexpr const char* kStrategyNames[] = {"P4", "P2", "P2F", "P2R", "P2FR", "P2FRT"};

bool uses_degree4(Strategy s) { return s == Strategy::kP4; }
bool uses_fusing(Strategy s) {
  return s == Strategy::kP2F || s == Strategy::kP2FR || s == Strategy::kP2FRT;
}
bool uses_redistribution(Strategy s) {
  return s == Strategy::kP2R || s == Strategy::kP2FR || s == Strategy::kP2FRT;
}

[[noreturn]] void mismatch(Strategy s, int id, const std::string& what) {
  throw StrategyError(std::string(to_string(s)) + ": node " + std::to_string(id) + " " + what);
}

}  // namespace

const char* to_string(Strategy s) { return kStrategyNames[static_cast<int>(s)]; }

Strategy strategy_from_string(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  for (int i = 0; i < 6; ++i) {
    if (upper == kStrategyNames[i]) return static_cast<Strategy>(i);
  }
  throw StrategyError("unknown strategy '" + name + "'");
}

const std::vector<Strategy>& all_strategies() {
  static const std::vector<Strategy> all = {Strategy::kP4,  Strategy::kP2,   Strategy::kP2F,
                                            Strategy::kP2R, Strategy::kP2FR, Strategy::kP2FRT};
  return all;
}

int LevelCostTable::poly(int degree, bool monic) const { return mult_depth(degree, monic); }

int LevelCostTable::edge_cost(const Node& node, std::size_t input_index) const {
  switch (node.kind()) {
    case NodeKind::kInput:
    case NodeKind::kOutput:
      return 0;
    case NodeKind::kConv:
      return conv;
    case NodeKind::kLinear:
      return linear;
    case NodeKind::kBatchNorm:
      return node.as<BatchNormNode>().slopes_unit() ? batchnorm_unit : batchnorm;
    case NodeKind::kAvgPool:
      return node.as<AvgPoolNode>().scale == 1.0 ? avgpool_unit : avgpool;
    case NodeKind::kPolyAct: {
      const auto& p = node.as<PolyActNode>();
      return poly(p.degree(), p.monic());
    }
    case NodeKind::kPolySkip: {
      const auto& s = node.as<PolySkipNode>();
      // The normalized x branch only squares; y-branch coefficients cost one
      // plaintext multiplication on top.
      if (input_index == 0) return poly(s.degree(), s.monic_x());
      return poly(s.degree(), false);
    }
    case NodeKind::kAdd: {
      const auto& a = node.as<AddNode>();
      return AddNode::unit(input_index == 0 ? a.weight_x : a.weight_y) ? 0 : add_scaled_edge;
    }
  }
  return 0;
}

CriticalPath critical_path(const ModelGraph& g, const LevelCostTable& table) {
  std::map<int, int> depth;
  std::map<int, int> parent;
  for (int id : g.topological_order()) {
    const Node& n = g.node(id);
    int best = 0;
    int from = -1;
    for (std::size_t k = 0; k < n.inputs.size(); ++k) {
      int d = depth.at(n.inputs[k]) + table.edge_cost(n, k);
      if (from < 0 || d > best || (d == best && n.inputs[k] < from)) {
        best = d;
        from = n.inputs[k];
      }
    }
    depth[id] = best;
    parent[id] = from;
  }
  CriticalPath cp;
  int out = g.output_id();
  cp.levels = depth.at(out);
  for (int id = out; id >= 0; id = parent.at(id)) cp.nodes.push_back(id);
  std::reverse(cp.nodes.begin(), cp.nodes.end());
  return cp;
}

void check_strategy_form(const ModelGraph& g, Strategy s) {
  for (const auto& [id, n] : g.nodes()) {
    switch (n.kind()) {
      case NodeKind::kPolyAct:
      case NodeKind::kPolySkip: {
        int d = n.kind() == NodeKind::kPolyAct ? n.as<PolyActNode>().degree()
                                               : n.as<PolySkipNode>().degree();
        if (uses_degree4(s) && d != 4) mismatch(s, id, "has a degree-" + std::to_string(d) + " activation, expected 4");
        if (!uses_degree4(s) && d > 2) mismatch(s, id, "has a degree-" + std::to_string(d) + " activation, expected <= 2");
        bool monic = n.kind() == NodeKind::kPolyAct ? n.as<PolyActNode>().monic()
                                                    : n.as<PolySkipNode>().monic_x();
        if (uses_redistribution(s) && !monic) mismatch(s, id, "leading coefficient is not normalized");
        break;
      }
      case NodeKind::kBatchNorm:
        if (uses_fusing(s)) mismatch(s, id, "is a batch norm left after fusing");
        if (uses_redistribution(s) && !n.as<BatchNormNode>().slopes_unit()) {
          mismatch(s, id, "batch norm slope is not normalized");
        }
        break;
      case NodeKind::kAvgPool:
        if (uses_redistribution(s) && n.as<AvgPoolNode>().scale != 1.0) {
          mismatch(s, id, "pool divisor is not normalized");
        }
        break;
      default:
        break;
    }
  }
}

int analyze_levels(const ModelGraph& g, Strategy strategy, const LevelCostTable& table) {
  check_strategy_form(g, strategy);
  int levels = critical_path(g, table).levels;
  if (strategy == Strategy::kP2FRT) return (levels + 1) / 2;
  return levels;
}

}  // namespace polyhe
