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

#include "polyhe/transform/pipeline.hpp"

#include "polyhe/transform/redistribution.hpp"

namespace polyhe {

nlohmann::json to_json(const PassReport& report) {
  nlohmann::json rewrites = nlohmann::json::array();
  for (const auto& r : report.rewrites) rewrites.push_back({{"rule", r.rule}, {"nodes", r.nodes}});
  return {{"strategy", to_string(report.strategy)},
          {"rewrites", rewrites},
          {"nodes_removed", report.nodes_removed},
          {"depth_before", report.depth_before},
          {"depth_after", report.depth_after}};
}

namespace {

bool fuses(Strategy s) {
  return s == Strategy::kP2F || s == Strategy::kP2FR || s == Strategy::kP2FRT;
}

bool redistributes(Strategy s) {
  return s == Strategy::kP2R || s == Strategy::kP2FR || s == Strategy::kP2FRT;
}

}  // namespace

std::pair<ModelGraph, PassReport> apply_pipeline(const ModelGraph& g, Strategy strategy) {
  const LevelCostTable table;
  PassReport report;
  report.strategy = strategy;
  report.depth_before = critical_path(g, table).levels;
  ModelGraph out = g;
  if (fuses(strategy)) report.rewrites = fuse_graph(out);
  if (redistributes(strategy)) redistribute_all(out);
  out.validate();
  report.nodes_removed = g.size() - out.size();
  report.depth_after = analyze_levels(out, strategy, table);
  return {std::move(out), report};
}

std::map<Strategy, int> level_table(ResNetVariant variant) {
  std::map<Strategy, int> out;
  for (Strategy s : all_strategies()) {
    ResNetOptions opts;
    opts.variant = variant;
    opts.act_degree = s == Strategy::kP4 ? 4 : 2;
    opts.width = 4;
    opts.calibrate = false;
    auto g = build_resnet_graph(opts);
    out[s] = apply_pipeline(g, s).second.depth_after;
  }
  return out;
}

}  // namespace polyhe
