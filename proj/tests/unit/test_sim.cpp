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

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "helpers.hpp"
#include "polyhe/cluster/clustering.hpp"
#include "polyhe/errors.hpp"
#include "polyhe/graph/reference.hpp"
#include "polyhe/sim/executor.hpp"
#include "polyhe/sim/planner.hpp"
#include "polyhe/sim/probe.hpp"
#include "polyhe/transform/equivalence.hpp"
#include "polyhe/transform/pipeline.hpp"

using namespace polyhe;

namespace {

ModelGraph single(NodePayload body, TensorShape in) {
  ModelGraph g;
  int x = g.add_node(InputNode{in});
  int b = g.add_node(std::move(body), {x});
  g.add_node(OutputNode{}, {b});
  return g;
}

Tensor ramp(TensorShape s) {
  Tensor t(s);
  for (std::size_t k = 0; k < t.data.size(); ++k) t.data[k] = 0.1 * static_cast<double>(k) - 0.3;
  return t;
}

ModelGraph p2fr(ResNetVariant v, std::size_t width, std::size_t hw, std::uint64_t seed) {
  ResNetOptions o;
  o.variant = v;
  o.width = width;
  o.input = {3, hw, hw};
  o.seed = seed;
  return apply_pipeline(build_resnet_graph(o), Strategy::kP2FR).first;
}

CompileOptions exact(int sublevels = 2) {
  CompileOptions c;
  c.log2_delta = 40;
  c.sublevels = sublevels;
  return c;
}

}  // namespace

TEST(Scalars, EncodeDecodeAndRounding) {
  EXPECT_EQ(encode_scalar(0.5, 1), 1);
  EXPECT_EQ(encode_scalar(-0.75, 1), -2);  // -1.5 rounds away from zero
  EXPECT_EQ(encode_scalar(3.0, 40), mpz_class(3) << 40);
  EXPECT_DOUBLE_EQ(decode_scalar(mpz_class(3) << 40, 40), 3.0);
  EXPECT_EQ(divide_round(7, 2), 4);
  EXPECT_EQ(divide_round(-7, 2), -4);
  EXPECT_EQ(divide_round(5, 3), 2);
  EXPECT_THROW(encode_scalar(NAN, 4), Error);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<long> u(-1000000000, 1000000000);
  for (int i = 0; i < 1000; ++i) {
    mpz_class z = u(rng), q = 1 + std::abs(u(rng)) % 1000;
    mpz_class r = divide_round(z, q);
    mpz_class err = r * q - z;
    EXPECT_LE(2 * abs(err), q);
  }
}

TEST(Layout, SmallImageFillsLeadingSlots) {
  auto l = make_input_layout(3, 3, 0, 1, 4096);
  Tensor img({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  auto ct = encode_input(img, l, 40, 1, 0);
  ASSERT_EQ(ct[0].slots.size(), 4096u);
  for (std::size_t s = 0; s < 9; ++s) EXPECT_EQ(ct[0].slots[s], encode_scalar(img.data[s], 40));
  auto gaps = l.gap_mask();
  for (std::size_t s = 0; s < 4096; ++s) {
    EXPECT_EQ(gaps[s], s >= 9);
    if (s >= 9) {
      EXPECT_EQ(ct[0].slots[s], 0);
    }
  }
  EXPECT_THROW(make_input_layout(64, 64, 0, 2, 4096), CapacityError);
}

TEST(Layout, EnsembleReplicatesIntoRegions) {
  auto l = make_input_layout(3, 3, 0, 2, 4096);
  Tensor img({1, 3, 3}, {1, 2, 3, 4, 5, 6, 7, 8, 9});
  auto ct = encode_input(img, l, 40, 1, 0);
  for (std::size_t s = 0; s < 9; ++s) EXPECT_EQ(ct[0].slots[s], ct[0].slots[l.region_size + s]);
  EXPECT_EQ(l.region_size, 16u);
}

TEST(Layout, RoundTripWithinHalfUlp) {
  auto l = make_input_layout(5, 5, 2, 1);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-4, 4);
  Tensor img({2, 5, 5});
  for (double& v : img.data) v = u(rng);
  auto cts = encode_input(img, l, 20, 1, 0);
  for (std::size_t c = 0; c < 2; ++c) {
    auto back = decode(cts[c], l, 20);
    for (std::size_t k = 0; k < 25; ++k) EXPECT_LE(std::fabs(back[k] - img.data[c * 25 + k]), 0.5 / (1 << 20));
  }
}

TEST(Layout, RotationIsAPermutation) {
  auto l = make_input_layout(4, 4, 1, 1);
  auto ct = encode_input(ramp({1, 4, 4}), l, 30, 1, 0)[0];
  for (long step : {1L, -3L, 17L, 0L}) {
    auto r = rotate(ct, step);
    auto a = ct.slots, b = r.slots;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);
    const long n = static_cast<long>(ct.slots.size());
    EXPECT_EQ(r.slots[0], ct.slots[((step % n) + n) % n]);
  }
}

TEST(ConvOp, IdentityTapKeepsSlotsAndAddsOneSublevel) {
  auto g = single(ConvNode{1, 1, 1, 1, 1, 0, {1.0}, {0.0}}, {1, 4, 4});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  RunOptions opts;
  opts.trace = true;
  auto x = ramp({1, 4, 4});
  auto r = run_circuit(prog, x, opts);
  for (std::size_t k = 0; k < 16; ++k) EXPECT_NEAR(r.member_outputs[0][k], x.data[k], 1e-11);
  const auto& in_layout = prog.layouts[prog.input_layout];
  EXPECT_TRUE(in_layout.same_placement(prog.layouts[prog.output_layout]));
  auto mult = std::find_if(r.trace.begin(), r.trace.end(), [](auto& t) { return t.op == OpCode::kMultPlain; });
  ASSERT_NE(mult, r.trace.end());
  EXPECT_EQ(mult->lambda, prog.input_lambda + 1);
}

TEST(ConvOp, ValidConvolutionIsTopLeftAnchored) {
  std::mt19937_64 rng(3);
  auto conv = polyhe::testing::random_conv(2, 1, 3, 1, rng);
  conv.padding = 0;
  auto g = single(conv, {1, 4, 4});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  const auto& out = prog.layouts[prog.output_layout];
  EXPECT_EQ(out.valid_slots(), (std::vector<std::size_t>{0, 1, 4, 5}));
  auto x = ramp({1, 4, 4});
  auto r = run_circuit(prog, x);
  auto ref = reference_eval(g, x);
  ASSERT_EQ(ref.size(), 8u);
  for (std::size_t k = 0; k < 8; ++k) EXPECT_NEAR(r.member_outputs[0][k], ref[k], 1e-10);
}

TEST(ConvOp, StrideLeavesLazyGaps) {
  auto g = single(ConvNode{1, 1, 1, 1, 2, 0, {1.0}, {0.0}}, {1, 4, 4});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  const auto& out = prog.layouts[prog.output_layout];
  std::vector<std::size_t> expect;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) expect.push_back(2 * i * 4 + 2 * j);
  EXPECT_EQ(out.valid_slots(), expect);
  auto x = ramp({1, 4, 4});
  auto r = run_circuit(prog, x);
  EXPECT_NEAR(r.member_outputs[0][3], x.data[2 * 4 + 2], 1e-11);
}

TEST(ConvOp, PaddedStridedStackMatchesReference) {
  std::mt19937_64 rng(4);
  ModelGraph g;
  int x = g.add_node(InputNode{{2, 8, 8}});
  x = g.add_node(polyhe::testing::random_conv(3, 2, 3, 2, rng), {x});
  x = g.add_node(polyhe::testing::random_conv(3, 3, 3, 1, rng), {x});
  x = g.add_node(polyhe::testing::random_conv(2, 3, 3, 2, rng), {x});
  g.add_node(OutputNode{}, {x});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  auto in = random_inputs(g, 1, 5)[0];
  auto r = run_circuit(prog, in);
  EXPECT_LE(relative_error(reference_eval(g, in), r.member_outputs[0]), 1e-9);
}

TEST(Activation, SquareDoublesSublevel) {
  auto g = single(PolyActNode::shared({0.0, 0.0, 1.0}), {1, 2, 2});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  RunOptions opts;
  opts.trace = true;
  auto r = run_circuit(prog, ramp({1, 2, 2}), opts);
  ASSERT_GE(r.trace.size(), 2u);
  EXPECT_EQ(r.trace[0].lambda, 1);
  EXPECT_EQ(r.trace[1].op, OpCode::kMultCt);
  EXPECT_EQ(r.trace[1].lambda, 2);
}

TEST(Activation, TowerReuseTraceMatchesGolden) {
  ModelGraph g;
  int x = g.add_node(InputNode{{1, 2, 2}});
  int y = g.add_node(PolyActNode::shared({0.25, 0.5, 1.0}), {x});
  int z = g.add_node(ConvNode{1, 1, 1, 1, 1, 0, {0.5}, {0.1}}, {y});
  g.add_node(OutputNode{}, {z});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  RunOptions opts;
  opts.trace = true;
  auto r = run_circuit(prog, ramp({1, 2, 2}), opts);

  std::ifstream f(std::string(POLYHE_TEST_DATA) + "/golden/tower_reuse_trace.json");
  auto golden = nlohmann::json::parse(f).at("steps");
  ASSERT_EQ(r.trace.size(), golden.size());
  for (std::size_t i = 0; i < golden.size(); ++i) {
    EXPECT_EQ(to_string(r.trace[i].op), golden[i].at("op").get<std::string>()) << i;
    EXPECT_EQ(r.trace[i].lambda, golden[i].at("lambda").get<int>()) << i;
    EXPECT_EQ(r.trace[i].level, golden[i].at("level").get<int>()) << i;
  }
  auto ref = reference_eval(g, ramp({1, 2, 2}));
  EXPECT_LE(relative_error(ref, r.member_outputs[0]), 1e-10);
}

TEST(Activation, SkipWithoutCrossTermIsTwoUnivariates) {
  PolySkipNode::Terms t{{{2, 0}, 1.0}, {{1, 0}, 0.3}, {{0, 2}, 0.7}, {{0, 1}, -0.2}, {{0, 0}, 0.05}};
  ModelGraph g;
  int in = g.add_node(InputNode{{1, 4, 4}});
  int a = g.add_node(ConvNode{1, 1, 1, 1, 1, 0, {0.8}, {0.1}}, {in});
  int s = g.add_node(PolySkipNode::shared(t), {a, in});
  g.add_node(OutputNode{}, {s});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  auto x = ramp({1, 4, 4});
  auto r = run_circuit(prog, x);
  for (std::size_t k = 0; k < 16; ++k) {
    const double u = 0.8 * x.data[k] + 0.1, v = x.data[k];
    EXPECT_NEAR(r.member_outputs[0][k], (u * u + 0.3 * u) + (0.7 * v * v - 0.2 * v + 0.05), 1e-10);
  }
}

TEST(RunCircuit, EmptyProgramRoundTrips) {
  ModelGraph g;
  int x = g.add_node(InputNode{{2, 3, 3}});
  g.add_node(OutputNode{}, {x});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  auto in = ramp({2, 3, 3});
  auto r = run_circuit(prog, in);
  for (std::size_t k = 0; k < in.data.size(); ++k) EXPECT_NEAR(r.member_outputs[0][k], in.data[k], 0.5 / std::ldexp(1.0, 40));
}

TEST(RunCircuit, ExactModeMatchesReferenceOnAllVariants) {
  for (auto v : {ResNetVariant::kRN18, ResNetVariant::kRN20, ResNetVariant::kRN32}) {
    auto g = p2fr(v, 4, 8, 2);
    auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
    auto x = random_inputs(g, 1, 6)[0];
    auto r = run_circuit(prog, x);
    EXPECT_LE(relative_error(reference_eval(g, x), r.member_outputs[0]), 1e-6) << to_string(v);
    EXPECT_EQ(prog.levels_used, analyze_levels(g, Strategy::kP2FRT));
  }
}

TEST(RunCircuit, PackedEnsembleAveragesSoloRuns) {
  auto a = p2fr(ResNetVariant::kRN20, 4, 8, 3);
  auto b = p2fr(ResNetVariant::kRN20, 4, 8, 4);
  auto x = random_inputs(a, 1, 7)[0];
  auto packed = run_circuit(compile_circuit(std::vector<ModelGraph>{a, b}, exact()), x);
  auto ra = run_circuit(compile_circuit(std::vector<ModelGraph>{a}, exact()), x);
  auto rb = run_circuit(compile_circuit(std::vector<ModelGraph>{b}, exact()), x);
  ASSERT_EQ(packed.member_outputs.size(), 2u);
  for (std::size_t k = 0; k < packed.averaged.size(); ++k) {
    EXPECT_NEAR(packed.averaged[k], 0.5 * (ra.member_outputs[0][k] + rb.member_outputs[0][k]), 1e-10);
    EXPECT_NEAR(packed.member_outputs[1][k], rb.member_outputs[0][k], 1e-10);
  }
}

TEST(RunCircuit, ScheduleTamperingIsDetected) {
  auto g = single(PolyActNode::shared({0.0, 0.0, 1.0}), {1, 2, 2});
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  prog.instructions[1].lambda = 3;
  EXPECT_THROW(run_circuit(prog, ramp({1, 2, 2})), ScheduleError);
}

TEST(RunCircuit, ProgramJsonRoundTrip) {
  auto g = p2fr(ResNetVariant::kRN20, 4, 8, 5);
  auto prog = compile_circuit(std::vector<ModelGraph>{g}, exact());
  auto back = program_from_json(nlohmann::json::parse(to_json(prog).dump()));
  auto x = random_inputs(g, 1, 8)[0];
  EXPECT_EQ(run_circuit(prog, x).member_outputs, run_circuit(back, x).member_outputs);
  auto bad = to_json(prog);
  bad["instructions"][3][2] = 999999;
  EXPECT_THROW(program_from_json(bad), ScheduleError);
}

TEST(RunCircuit, ClusteredWeightsBoundEncodingsPerSlice) {
  auto g = p2fr(ResNetVariant::kRN20, 4, 8, 6);
  const std::size_t k = 3;
  auto [q, report] = slice_cluster(g, k, 1);
  auto prog = compile_circuit(std::vector<ModelGraph>{q}, exact());
  ASSERT_FALSE(prog.slice_encodings.empty());
  for (const auto& [tag, n] : prog.slice_encodings) EXPECT_LE(n, k);
  auto [qs, r2] = ensemble_slice_cluster(std::vector<ModelGraph>{g, p2fr(ResNetVariant::kRN20, 4, 8, 7)}, k, 1);
  auto packed = compile_circuit(qs, exact());
  for (const auto& [tag, n] : packed.slice_encodings) EXPECT_LE(n, k);
}

TEST(Planner, EmergentCountMatchesAnalyzer) {
  for (auto v : {ResNetVariant::kRN18, ResNetVariant::kRN20, ResNetVariant::kRN32}) {
    auto g = p2fr(v, 4, 32, 1);
    EXPECT_EQ(plan_modulus_chain(g, exact(2)).rescale_count, analyze_levels(g, Strategy::kP2FRT)) << to_string(v);
    EXPECT_EQ(plan_modulus_chain(g, exact(1)).rescale_count, analyze_levels(g, Strategy::kP2FR)) << to_string(v);
  }
}

TEST(Planner, EveryStrategyMatchesAnalyzer) {
  for (auto v : {ResNetVariant::kRN18, ResNetVariant::kRN20}) {
    for (auto s : all_strategies()) {
      ResNetOptions o;
      o.variant = v;
      o.width = 4;
      o.input = {3, 8, 8};
      o.act_degree = s == Strategy::kP4 ? 4 : 2;
      auto g = apply_pipeline(build_resnet_graph(o), s).first;
      auto plan = plan_modulus_chain(g, exact(s == Strategy::kP2FRT ? 2 : 1));
      EXPECT_EQ(plan.rescale_count, analyze_levels(g, s)) << to_string(v) << " " << to_string(s);
    }
  }
}

TEST(Planner, PresetsFitTheirVariants) {
  const std::pair<ResNetVariant, const char*> cases[] = {
      {ResNetVariant::kRN18, "rn18"}, {ResNetVariant::kRN20, "rn20"}, {ResNetVariant::kRN32, "rn32"}};
  for (const auto& [v, name] : cases) {
    auto g = p2fr(v, 4, 32, 1);
    auto plan = plan_modulus_chain(g, exact(), load_preset(name));
    EXPECT_EQ(plan.rescale_count, plan.chain.rescale_count()) << name;
    EXPECT_FALSE(plan.schedule.empty());
  }
  auto rn32 = p2fr(ResNetVariant::kRN32, 4, 32, 1);
  EXPECT_THROW(plan_modulus_chain(rn32, exact(), load_preset("rn20")), DepthExhaustedError);
}

TEST(Planner, ChainTooShortExhaustsDepth) {
  auto g = p2fr(ResNetVariant::kRN20, 4, 8, 1);
  EXPECT_THROW(lower_circuit(std::vector<ModelGraph>{g}, make_chain(40, 2, 5)), DepthExhaustedError);
}

TEST(Probe, ExactModuliOnlyRound) {
  auto pts = rescale_error_sweep(3, {0.0});
  EXPECT_LE(pts[0].max_rel_error, 1e-9);
}

TEST(Probe, ErrorGrowsWithDeviation) {
  auto pts = rescale_error_sweep(4, {0.0, 1e-4, 1e-3, 1e-2, 5e-2});
  for (std::size_t i = 1; i < pts.size(); ++i) {
    EXPECT_GE(pts[i].log_ratio, pts[i - 1].log_ratio);
    EXPECT_GE(pts[i].max_rel_error, pts[i - 1].max_rel_error);
  }
  EXPECT_GT(pts.back().max_rel_error, 10 * pts.front().max_rel_error);
}

TEST(Probe, ErrorGrowsWithDepth) {
  double prev = 0.0;
  for (int depth = 1; depth <= 5; ++depth) {
    auto p = rescale_error_sweep(depth, {1e-3})[0];
    EXPECT_GE(p.max_rel_error, prev) << depth;
    prev = p.max_rel_error;
  }
}

TEST(Probe, PresetPrimesStayClose) {
  auto chain = load_preset("rn20");
  auto q = chain_moduli(chain);
  ASSERT_TRUE(q.has_value());
  ASSERT_EQ(q->size(), 21u);
  for (std::size_t i = 1; i < q->size(); ++i) {
    double ratio = (*q)[i].get_d() / std::ldexp(1.0, 42);
    EXPECT_NEAR(ratio, 1.0, 1e-3);
  }
}
