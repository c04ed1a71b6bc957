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

#include <gtest/gtest.h>

#include "polyhe/transform/pipeline.hpp"

using namespace polyhe;

TEST(LevelTable, Rn18) {
  auto t = level_table(ResNetVariant::kRN18);
  EXPECT_EQ(t[Strategy::kP4], 87);
  EXPECT_EQ(t[Strategy::kP2], 70);
  EXPECT_EQ(t[Strategy::kP2F], 53);
  EXPECT_EQ(t[Strategy::kP2R], 35);
  EXPECT_EQ(t[Strategy::kP2FR], 35);
  EXPECT_EQ(t[Strategy::kP2FRT], 18);
}

TEST(LevelTable, Rn20AndRn32) {
  auto t20 = level_table(ResNetVariant::kRN20);
  auto t32 = level_table(ResNetVariant::kRN32);
  EXPECT_EQ(t20[Strategy::kP4], 97);
  EXPECT_EQ(t20[Strategy::kP2FRT], 20);
  EXPECT_EQ(t32[Strategy::kP4], 157);
  EXPECT_EQ(t32[Strategy::kP2FRT], 32);
}

#include <algorithm>
#include <cmath>
#include <random>

#include "polyhe/errors.hpp"
#include "polyhe/levels/modulus_chain.hpp"
#include "polyhe/levels/sublevel.hpp"

TEST(LevelAnalysis, EmptyGraphHasNoLevels) {
  ModelGraph g;
  int in = g.add_node(InputNode{{1, 2, 2}});
  g.add_node(OutputNode{}, {in});
  for (Strategy s : all_strategies()) EXPECT_EQ(analyze_levels(g, s), 0) << to_string(s);
}

TEST(LevelAnalysis, FormMismatchIsRejected) {
  ResNetOptions o;
  o.variant = ResNetVariant::kRN20;
  o.width = 4;
  o.calibrate = false;
  o.act_degree = 4;
  auto quartic = build_resnet_graph(o);
  EXPECT_THROW(analyze_levels(quartic, Strategy::kP2), StrategyError);
  o.act_degree = 2;
  auto quad = build_resnet_graph(o);
  EXPECT_THROW(analyze_levels(quad, Strategy::kP4), StrategyError);
  EXPECT_THROW(analyze_levels(quad, Strategy::kP2F), StrategyError);
  EXPECT_THROW(analyze_levels(quad, Strategy::kP2R), StrategyError);
  // 19 x (conv + bn + quadratic) + pool + linear
  EXPECT_EQ(analyze_levels(quad, Strategy::kP2), 19 * 4 + 2);
}

TEST(LevelAnalysis, InvariantUnderRelabeling) {
  ResNetOptions o;
  o.variant = ResNetVariant::kRN18;
  o.width = 4;
  o.calibrate = false;
  auto g = build_resnet_graph(o);
  std::vector<int> ids;
  for (const auto& [id, n] : g.nodes()) ids.push_back(id);
  auto shuffled = ids;
  std::mt19937_64 rng(1);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  std::map<int, int> relabel;
  for (std::size_t k = 0; k < ids.size(); ++k) relabel[ids[k]] = shuffled[k] + 1000;
  ModelGraph h;
  for (int id : g.topological_order()) {
    std::vector<int> inputs;
    for (int in : g.node(id).inputs) inputs.push_back(relabel.at(in));
    h.insert_node(relabel.at(id), g.node(id).payload, inputs);
  }
  h.validate();
  for (Strategy s : {Strategy::kP2, Strategy::kP2FR, Strategy::kP2FRT}) {
    EXPECT_EQ(apply_pipeline(g, s).second.depth_after, apply_pipeline(h, s).second.depth_after);
  }
}

TEST(LevelAnalysis, FusingNeverLosesToRedistributionAlone) {
  for (auto v : {ResNetVariant::kRN18, ResNetVariant::kRN20, ResNetVariant::kRN32}) {
    auto t = level_table(v);
    EXPECT_EQ(t[Strategy::kP2FR], t[Strategy::kP2R]);
    EXPECT_EQ(t[Strategy::kP2FRT], (t[Strategy::kP2FR] + 1) / 2);
    EXPECT_LT(t[Strategy::kP2F], t[Strategy::kP2]);
    EXPECT_LT(t[Strategy::kP2], t[Strategy::kP4]);
  }
}

TEST(LevelAnalysis, PassReportDepthNeverGrows) {
  ResNetOptions o;
  o.variant = ResNetVariant::kRN20;
  o.width = 4;
  o.calibrate = false;
  auto g = build_resnet_graph(o);
  for (Strategy s : {Strategy::kP2, Strategy::kP2F, Strategy::kP2R, Strategy::kP2FR, Strategy::kP2FRT}) {
    auto report = apply_pipeline(g, s).second;
    EXPECT_LE(report.depth_after, report.depth_before) << to_string(s);
  }
}

TEST(LevelAnalysis, StrategyNames) {
  for (Strategy s : all_strategies()) EXPECT_EQ(strategy_from_string(to_string(s)), s);
  EXPECT_EQ(strategy_from_string("p2fr"), Strategy::kP2FR);
  EXPECT_THROW(strategy_from_string("p3"), Error);
}

TEST(Sublevel, Rounding) {
  const double delta = std::ldexp(1.0, 20);
  EXPECT_EQ(sublevel(delta, delta), 1);
  EXPECT_EQ(sublevel(std::pow(delta, 3), delta), 3);
  EXPECT_EQ(sublevel(std::pow(delta, 2.4), delta), 2);
  EXPECT_EQ(sublevel(std::pow(delta, 2.5), delta), 3);
  for (int a = 0; a <= 40; ++a) {
    EXPECT_EQ(sublevel(std::ldexp(1.0, 20 * a / 4), delta), static_cast<int>(std::lround(a / 4.0)));
  }
  EXPECT_EQ(sublevel_log2(60.0, 20.0), 3);
}

TEST(Sublevel, RescaleDecision) {
  const double delta = std::ldexp(1.0, 20);
  auto z = CiphertextMeta::make(std::pow(delta, 3), delta, 5);
  EXPECT_EQ(z.sublevel, 3);
  EXPECT_TRUE(needs_rescale(z, 2));
  EXPECT_FALSE(needs_rescale(CiphertextMeta::make(delta * delta, delta, 5), 2));
  EXPECT_FALSE(needs_rescale(CiphertextMeta::make(delta, delta, 0), 1));
  auto down = apply_rescale(z, delta * delta, 2);
  EXPECT_EQ(down.level, 4);
  EXPECT_EQ(down.sublevel, 1);
  EXPECT_DOUBLE_EQ(down.scale, delta);
  auto twice = apply_rescale(apply_rescale(z, delta, 1), delta, 1);
  EXPECT_EQ(twice.level, 3);
  auto dead = apply_rescale(CiphertextMeta::make(delta * delta, delta, 1), delta * delta, 2);
  EXPECT_EQ(dead.sublevel, 0);
  EXPECT_THROW(needs_rescale(CiphertextMeta::make(std::pow(delta, 3), delta, 0), 2), DepthExhaustedError);
  EXPECT_THROW(apply_rescale(CiphertextMeta::make(delta, delta, 0), delta, 1), DepthExhaustedError);
}

TEST(ModulusChain, PresetTotals) {
  struct Case {
    const char* name;
    int total, rescale, bits, delta, n;
  };
  for (auto c : {Case{"rn18", 869, 18, 44, 22, 15}, Case{"rn20", 906, 20, 42, 21, 15},
                 Case{"rn32", 1745, 32, 52, 26, 16}}) {
    auto p = load_preset(c.name);
    p.validate();
    EXPECT_EQ(p.total_bits(), c.total) << c.name;
    EXPECT_EQ(p.rescale_count(), c.rescale);
    EXPECT_EQ(p.log2_delta, c.delta);
    EXPECT_EQ(p.log2_n, c.n);
    for (const auto& m : p.drop_order()) {
      EXPECT_EQ(m.bits, c.bits);
      EXPECT_EQ(m.sublevel, 2);
      EXPECT_EQ(std::lround(hex_log2(m.hex)), m.bits);
    }
    EXPECT_EQ(p.moduli.front().role, ModulusRole::kOutput);
    EXPECT_EQ(p.moduli.back().role, ModulusRole::kSpecial);
  }
}

TEST(ModulusChain, JsonRoundTrip) {
  auto p = load_preset("rn20");
  auto q = chain_from_json(to_json(p));
  EXPECT_EQ(to_json(q), to_json(p));
  auto m = make_chain(40, 2, 5, 15, 60, 60);
  EXPECT_EQ(m.rescale_count(), 5);
  EXPECT_EQ(m.total_bits(), 5 * 80 + 120);
  EXPECT_THROW(load_preset("rn99"), Error);
}
