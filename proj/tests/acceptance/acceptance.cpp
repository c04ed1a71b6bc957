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

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "oracles/train_oracles.hpp"
#include "polyhe/cli/pipeline.hpp"
#include "polyhe/cluster/clustering.hpp"
#include "polyhe/cluster/kmeans.hpp"
#include "polyhe/graph/model_io.hpp"
#include "polyhe/graph/reference.hpp"
#include "polyhe/graph/resnet.hpp"
#include "polyhe/levels/level_analysis.hpp"
#include "polyhe/levels/modulus_chain.hpp"
#include "polyhe/poly/fixed_point_poly.hpp"
#include "polyhe/sim/executor.hpp"
#include "polyhe/sim/planner.hpp"
#include "polyhe/sim/probe.hpp"
#include "polyhe/train/lemmas.hpp"
#include "polyhe/train/tiny_mlp.hpp"
#include "polyhe/transform/equivalence.hpp"
#include "polyhe/transform/fusion.hpp"
#include "polyhe/transform/pipeline.hpp"
#include "polyhe/transform/redistribution.hpp"

using namespace polyhe;

namespace {

const std::string kData = POLYHE_TEST_DATA;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  std::string name;
  double budget_s;  // 0 when the criterion sets no time limit
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double inf_norm(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

ResNetOptions variant_options(ResNetVariant v, int degree, std::uint64_t seed) {
  ResNetOptions o;
  o.variant = v;
  o.act_degree = degree;
  o.width = 4;
  o.input = {3, 8, 8};
  o.seed = seed;
  return o;
}

BatchNormNode random_bn(std::size_t channels, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1), pos(0.5, 2.0);
  BatchNormNode bn;
  for (std::size_t c = 0; c < channels; ++c) {
    bn.gamma.push_back(u(rng));
    bn.beta.push_back(u(rng));
    bn.mean.push_back(u(rng));
    bn.stddev.push_back(pos(rng));
  }
  return bn;
}

double bn_apply(const BatchNormNode& bn, std::size_t c, double x) { return bn.slope(c) * x + bn.intercept(c); }

// ---- criteria --------------------------------------------------------------

Outcome level_table_criterion() {
  // Expected rescale totals per variant and strategy.
  const std::map<ResNetVariant, std::map<Strategy, int>> expected = {
      {ResNetVariant::kRN18,
       {{Strategy::kP4, 87}, {Strategy::kP2, 70}, {Strategy::kP2F, 53}, {Strategy::kP2R, 35},
        {Strategy::kP2FR, 35}, {Strategy::kP2FRT, 18}}},
      {ResNetVariant::kRN20, {{Strategy::kP4, 97}, {Strategy::kP2FRT, 20}}},
      {ResNetVariant::kRN32, {{Strategy::kP4, 157}, {Strategy::kP2FRT, 32}}},
  };
  std::string detail;
  bool pass = true;
  for (const auto& [v, row] : expected) {
    detail += std::string(detail.empty() ? "" : "; ") + to_string(v);
    for (const auto& [s, want] : row) {
      ResNetOptions o;
      o.variant = v;
      o.act_degree = s == Strategy::kP4 ? 4 : 2;
      o.width = 4;
      o.calibrate = false;
      const auto g = apply_pipeline(build_resnet_graph(o), s).first;
      const int got = analyze_levels(g, s);
      pass = pass && got == want;
      detail += " " + std::string(to_string(s)) + "=" + std::to_string(got);
      if (got != want) detail += "(want " + std::to_string(want) + ")";
    }
  }
  return {pass, detail};
}

Outcome transform_equivalence_criterion() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-3, 3);
  double worst_case = 0;
  constexpr int kSamples = 1000;

  // Case 1: P(B(x)).
  {
    auto bn = random_bn(3, rng);
    auto act = PolyActNode::shared({u(rng), u(rng), u(rng)});
    auto fused = fuse_bn_act(bn, act);
    for (int i = 0; i < kSamples; ++i) {
      std::vector<double> want, got;
      for (std::size_t c = 0; c < 3; ++c) {
        const double x = u(rng);
        want.push_back(eval_real_poly(act.row(c), bn_apply(bn, c, x)));
        got.push_back(eval_real_poly(fused.row(c), x));
      }
      worst_case = std::max(worst_case, relative_error(want, got));
    }
  }
  // Case 2: B(C(x)) on whole images.
  {
    std::uniform_real_distribution<double> w(-1, 1);
    ConvNode conv{3, 2, 3, 3, 1, 1, {}, {}};
    for (std::size_t k = 0; k < 3 * 2 * 9; ++k) conv.weights.push_back(w(rng));
    for (int o = 0; o < 3; ++o) conv.bias.push_back(w(rng));
    auto bn = random_bn(3, rng);
    ModelGraph a;
    int in = a.add_node(InputNode{{2, 5, 5}});
    a.add_node(OutputNode{}, {a.add_node(bn, {a.add_node(conv, {in})})});
    ModelGraph f;
    int fin = f.add_node(InputNode{{2, 5, 5}});
    f.add_node(OutputNode{}, {f.add_node(fuse_bn_conv(conv, bn), {fin})});
    worst_case = std::max(worst_case, check_equivalence(a, f, random_inputs(a, kSamples, 102)).max_rel_error);
  }
  // Cases 3 and 4: P(B_X(x) + B_Y(y)) and P(B_X(x) + y).
  {
    auto bx = random_bn(2, rng), by = random_bn(2, rng);
    auto act = PolyActNode::shared({u(rng), u(rng), u(rng)});
    auto both = fuse_skip_bn_bn(bx, by, act);
    auto ident = fuse_skip_identity(bx, act);
    for (int i = 0; i < kSamples; ++i) {
      std::vector<double> want3, got3, want4, got4;
      for (std::size_t c = 0; c < 2; ++c) {
        const double x = u(rng), y = u(rng);
        want3.push_back(eval_real_poly(act.row(c), bn_apply(bx, c, x) + bn_apply(by, c, y)));
        got3.push_back(both.eval(c, x, y));
        want4.push_back(eval_real_poly(act.row(c), bn_apply(bx, c, x) + y));
        got4.push_back(ident.eval(c, x, y));
      }
      worst_case = std::max({worst_case, relative_error(want3, got3), relative_error(want4, got4)});
    }
  }

  double worst_pipeline = 0;
  std::size_t mismatches = 0;
  for (auto v : {ResNetVariant::kRN18, ResNetVariant::kRN20, ResNetVariant::kRN32}) {
    const auto g = build_resnet_graph(variant_options(v, 2, 103));
    const auto p2fr = apply_pipeline(g, Strategy::kP2FR).first;
    const auto r = check_equivalence(g, p2fr, random_inputs(g, 100, 104));
    worst_pipeline = std::max(worst_pipeline, r.max_rel_error);
    mismatches += r.argmax_mismatches;
  }
  const bool pass = worst_case <= 1e-10 && worst_pipeline <= 1e-8 && mismatches == 0;
  return {pass, "cases 1-4 max rel " + fmt("%.2e", worst_case) + " (<= 1e-10, 1000 inputs each); P2FR " +
                    fmt("%.2e", worst_pipeline) + " (<= 1e-8), argmax mismatches " + std::to_string(mismatches) +
                    " over 3 x 100 inputs"};
}

Outcome redistribution_criterion() {
  std::size_t checked = 0, bad = 0;
  for (auto v : {ResNetVariant::kRN18, ResNetVariant::kRN20, ResNetVariant::kRN32}) {
    for (auto s : {Strategy::kP2R, Strategy::kP2FR}) {
      const auto g = apply_pipeline(build_resnet_graph(variant_options(v, 2, 201)), s).first;
      for (const auto& [id, n] : g.nodes()) {
        if (n.kind() == NodeKind::kPolyAct) {
          const auto& p = n.as<PolyActNode>();
          for (std::size_t r = 0; r < p.rows(); ++r) {
            ++checked;
            bad += p.coeffs[r].back() != 1.0;
          }
        } else if (n.kind() == NodeKind::kPolySkip) {
          const auto& p = n.as<PolySkipNode>();
          for (std::size_t r = 0; r < p.rows(); ++r) {
            ++checked;
            bad += p.leading_x(r) != 1.0;
          }
        } else if (n.kind() == NodeKind::kAvgPool) {
          ++checked;
          bad += n.as<AvgPoolNode>().scale != 1.0;
        }
      }
    }
  }

  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(0.2, 3.0);
  auto g = build_resnet_graph(variant_options(ResNetVariant::kRN20, 2, 203));
  const auto orig = g;
  std::size_t donors = 0;
  for (int id : g.topological_order()) {
    const auto kind = g.node(id).kind();
    if (kind != NodeKind::kPolyAct && kind != NodeKind::kBatchNorm) continue;
    for (auto dir : {Direction::kForward, Direction::kBackward}) {
      if (dir == Direction::kBackward && g.consumers(g.node(id).inputs[0]).size() != 1) continue;
      UpdateTerm t{{u(rng)}, dir, id};
      apply_update_term(g, t);
      apply_update_term(g, UpdateTerm{{1.0 / t.upsilon[0]}, dir, id});
      ++donors;
    }
  }
  double worst = 0;
  auto cmp = [&](const std::vector<double>& a, const std::vector<double>& b) {
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::fabs(a[k] - b[k]) / std::max(1.0, std::fabs(b[k])));
  };
  for (const auto& [id, n] : g.nodes()) {
    const auto& o = orig.node(id);
    switch (n.kind()) {
      case NodeKind::kPolyAct:
        for (std::size_t r = 0; r < n.as<PolyActNode>().rows(); ++r)
          cmp(n.as<PolyActNode>().coeffs[r], o.as<PolyActNode>().coeffs[r]);
        break;
      case NodeKind::kConv:
        cmp(n.as<ConvNode>().weights, o.as<ConvNode>().weights);
        cmp(n.as<ConvNode>().bias, o.as<ConvNode>().bias);
        break;
      case NodeKind::kBatchNorm: {
        const auto& b = n.as<BatchNormNode>();
        const auto& ob = o.as<BatchNormNode>();
        for (std::size_t c = 0; c < b.channels(); ++c) {
          cmp({b.slope(c), b.intercept(c)}, {ob.slope(c), ob.intercept(c)});
        }
        break;
      }
      case NodeKind::kLinear:
        cmp(n.as<LinearNode>().weights, o.as<LinearNode>().weights);
        break;
      default:
        break;
    }
  }
  const bool pass = bad == 0 && checked > 0 && worst <= 1e-10;
  return {pass, std::to_string(checked) + " leading coefficients and pool divisors, " + std::to_string(bad) +
                    " not exactly 1; update then inverse on " + std::to_string(donors) +
                    " donor steps restores to " + fmt("%.2e", worst) + " (<= 1e-10)"};
}

Outcome tower_reuse_criterion() {
  ModelGraph g;
  int x = g.add_node(InputNode{{1, 2, 2}});
  int y = g.add_node(PolyActNode::shared({0.25, 0.5, 1.0}), {x});
  int z = g.add_node(ConvNode{1, 1, 1, 1, 1, 0, {0.5}, {0.1}}, {y});
  g.add_node(OutputNode{}, {z});
  CompileOptions opts;
  opts.log2_delta = 40;
  opts.sublevels = 2;
  const auto prog = compile_circuit({g}, opts);
  RunOptions ro;
  ro.trace = true;
  Tensor in({1, 2, 2}, {0.3, -0.7, 1.1, 0.05});
  const auto r = run_circuit(prog, in, ro);

  std::ifstream f(kData + "/golden/tower_reuse_trace.json");
  const auto golden = nlohmann::json::parse(f).at("steps");
  bool pass = golden.size() == r.trace.size();
  std::string got;
  for (std::size_t i = 0; i < r.trace.size(); ++i) {
    const auto& t = r.trace[i];
    got += std::string(got.empty() ? "" : " ") + to_string(t.op) + "(" + std::to_string(t.lambda) + "," +
           std::to_string(t.level) + ")";
    if (i < golden.size()) {
      pass = pass && golden[i].at("op").get<std::string>() == to_string(t.op) &&
             golden[i].at("lambda").get<int>() == t.lambda && golden[i].at("level").get<int>() == t.level;
    }
  }
  const double err = relative_error(reference_eval(g, in), r.member_outputs[0]);
  pass = pass && err <= 1e-10;
  return {pass, got + "; value rel err " + fmt("%.1e", err)};
}

Outcome preset_criterion() {
  const std::map<std::string, int> expected = {{"rn18", 869}, {"rn20", 906}, {"rn32", 1745}};
  bool pass = true;
  std::string detail;
  for (const auto& [name, want] : expected) {
    const auto chain = load_preset(name);
    std::ifstream f(preset_directory() / (name + ".json"));
    const auto j = nlohmann::json::parse(f).at("bits");
    const int stated = j.at("rescale").get<int>() * j.at("rescale_count").get<int>() + j.at("output").get<int>() +
                       j.at("special").get<int>();
    const bool ok = chain.total_bits() == want && stated == want;
    pass = pass && ok;
    detail += std::string(detail.empty() ? "" : ", ") + name + " log2 Q " + std::to_string(chain.total_bits()) +
              (ok ? "" : " (want " + std::to_string(want) + ")");
  }
  return {pass, detail};
}

Outcome poly_fit_criterion() {
  const auto r = fit_relu_poly(2, 2.0, 10);
  const auto want = oracle::relu_quadratic_search(2.0, 10);
  bool pass = r.poly.int_coeffs == want;
  std::mt19937_64 rng(601);
  std::uniform_int_distribution<int> deg(1, 4), bits(4, 12);
  std::uniform_real_distribution<double> interval(0.5, 4.0);
  int boxed = 0;
  for (int i = 0; i < 100; ++i) {
    const int d = deg(rng), b = bits(rng);
    const double c = interval(rng);
    boxed += fit_relu_poly(d, c, b).poly.within_box();
  }
  pass = pass && boxed == 100;
  std::string coeffs;
  for (auto a : r.poly.int_coeffs) coeffs += (coeffs.empty() ? "" : ",") + std::to_string(a);
  return {pass, "d=2 c=2 b=10 -> [" + coeffs + "]/2^10, oracle " + (r.poly.int_coeffs == want ? "agrees" : "differs") +
                    "; box holds on " + std::to_string(boxed) + "/100 random (d<=4, c<=4, b<=12)"};
}

Outcome lemma_criterion() {
  std::mt19937_64 rng(701);
  const auto act = fit_relu_poly(2, 2.0, 10).poly;
  double worst1 = 0, worst2 = 0, worst_step = 0;
  int penalty_states = 0, negative = 0;
  for (int trial = 0; trial < 50; ++trial) {
    TinyMLP net({4, 6, 5, 3}, act, rng());
    for (std::size_t l = 1; l <= net.layers(); ++l) net.weight(l) *= 5.0;
    std::uniform_real_distribution<double> u(-1, 1);
    Eigen::VectorXd x(4);
    for (Eigen::Index k = 0; k < 4; ++k) x(k) = u(rng);
    const Sample s{x, static_cast<int>(rng() % 3)};
    TrainConfig cfg;
    cfg.zeta = 0.2;
    cfg.learning_rate = 0.01;
    for (std::size_t layer : {1u, 2u}) {
      const auto r1 = lemma1_check(net, s, cfg, layer);
      const auto r2 = lemma2_check(net, s, cfg, layer);
      worst1 = std::max(worst1, r1.lemma1_rel_error);
      worst_step = std::max(worst_step, r1.lemma1_step_rel_error);
      if (r2.penalty_branch) {
        ++penalty_states;
        negative += r2.inner_product < 0;
        worst2 = std::max(worst2, r2.lemma2_rel_error);
      }
    }
  }
  double worst_grad = 0;
  for (auto widths : {std::vector<std::size_t>{3, 5, 2}, std::vector<std::size_t>{4, 6, 5, 3}}) {
    TinyMLP net(widths, act, 702);
    for (std::size_t l = 1; l <= net.layers(); ++l) net.weight(l) *= 3.0;
    std::vector<Sample> batch;
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 6; ++i) {
      Eigen::VectorXd x(static_cast<Eigen::Index>(widths[0]));
      for (Eigen::Index k = 0; k < x.size(); ++k) x(k) = u(rng);
      batch.push_back({x, static_cast<int>(rng() % widths.back())});
    }
    TrainConfig cfg;
    cfg.zeta = 0.5;
    worst_grad = std::max(worst_grad, oracle::gradient_check(net, batch, cfg, 6));
  }
  const bool pass = worst1 <= 1e-8 && penalty_states > 0 && negative == penalty_states && worst2 <= 1e-8 &&
                    worst_grad <= 1e-4;
  return {pass, "lemma 1 max rel " + fmt("%.1e", worst1) + " (<= 1e-8), stepped forward difference " + fmt("%.1e", worst_step) +
                    "; lemma 2 negative on " +
                    std::to_string(negative) + "/" + std::to_string(penalty_states) + " penalty states, closed form " +
                    fmt("%.1e", worst2) + " (<= 1e-8); gradients vs central differences " + fmt("%.1e", worst_grad) +
                    " (<= 1e-4)"};
}

std::size_t distinct_slice_values(const ModelGraph& g) {
  std::size_t worst = 0;
  for (int id : conv_layers(g)) {
    const auto& c = g.node(id).as<ConvNode>();
    for (std::size_t col = 0; col < c.kernel_w; ++col) {
      std::set<double> values;
      for (std::size_t o = 0; o < c.out_channels; ++o)
        for (std::size_t i = 0; i < c.in_channels; ++i)
          for (std::size_t h = 0; h < c.kernel_h; ++h) values.insert(c.weight(o, i, h, col));
      worst = std::max(worst, values.size());
    }
  }
  return worst;
}

Outcome clustering_criterion() {
  std::mt19937_64 rng(801);
  std::uniform_real_distribution<double> u(-2, 2);
  int matched = 0, total = 0;
  for (std::size_t m : {1u, 2u}) {
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = 4 + static_cast<std::size_t>(trial) % 5;
      const std::size_t k = 2 + static_cast<std::size_t>(trial) % 2;
      std::vector<Point> pts(n, Point(m));
      for (auto& p : pts)
        for (auto& v : p) v = u(rng);
      const auto cb = kmeans(pts, k, rng());
      ++total;
      matched += std::fabs(cb.distortion - oracle::kmeans_exhaustive_optimum(pts, k)) <= 1e-9;
    }
  }
  const std::size_t k = 4;
  const auto fixture = apply_pipeline(load_model(kData + "/fixtures/rn20_w8_s7.json"), Strategy::kP2FR).first;
  const auto [sliced, report] = slice_cluster(fixture, k, 802);
  const std::size_t worst_distinct = distinct_slice_values(sliced);
  const auto [solo, solo_report] = ensemble_slice_cluster(std::vector<ModelGraph>{fixture}, k, 802);
  const bool identical = serialize_model(solo.at(0)) == serialize_model(sliced);
  const bool pass = matched == total && worst_distinct <= k && identical;
  return {pass, std::to_string(matched) + "/" + std::to_string(total) +
                    " instances at the exhaustive optimum (1-D and R^2); max distinct values per slice " +
                    std::to_string(worst_distinct) + " (k=" + std::to_string(k) + "); ensemble M=1 " +
                    (identical ? "bit-identical" : "differs") + " to slice mode"};
}

Outcome simulator_criterion() {
  const auto a = apply_pipeline(load_model(kData + "/fixtures/rn20_w8_s7.json"), Strategy::kP2FR).first;
  const auto b = apply_pipeline(load_model(kData + "/fixtures/rn20_w8_s8.json"), Strategy::kP2FR).first;
  const Tensor x = read_tensor_file(kData + "/fixtures/input_3x8x8.f64");
  CompileOptions opts;
  opts.log2_delta = 40;
  opts.sublevels = 2;
  const auto prog_a = compile_circuit({a}, opts);
  const auto solo_a = run_circuit(prog_a, x);
  const double fidelity = relative_error(reference_eval(a, x), solo_a.member_outputs[0]);
  const auto solo_b = run_circuit(compile_circuit({b}, opts), x);
  const auto packed = run_circuit(compile_circuit({a, b}, opts), x);
  double ensemble = 0;
  for (std::size_t k = 0; k < packed.averaged.size(); ++k) {
    const double mean = 0.5 * (solo_a.member_outputs[0][k] + solo_b.member_outputs[0][k]);
    ensemble = std::max(ensemble, std::fabs(packed.averaged[k] - mean) / std::max(1e-300, inf_norm(packed.averaged)));
  }
  const bool pass = fidelity <= 1e-6 && ensemble <= 1e-10;
  return {pass, "rn20 P2FR 8x8, " + std::to_string(prog_a.levels_used) + " levels, rel err " +
                    fmt("%.2e", fidelity) + " (<= 1e-6); M=2 packed vs mean of solo runs " + fmt("%.2e", ensemble) +
                    " (<= 1e-10)"};
}

Outcome probe_criterion() {
  const std::vector<double> deviations{0.0, 1e-4, 1e-3, 1e-2, 5e-2};
  bool pass = true;
  std::string detail;
  for (int depth : {2, 4, 6}) {
    const auto pts = rescale_error_sweep(depth, deviations);
    std::string row;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i > 0) pass = pass && pts[i].max_rel_error >= pts[i - 1].max_rel_error && pts[i].log_ratio >= pts[i - 1].log_ratio;
      row += (row.empty() ? "" : " ") + fmt("%.1e", pts[i].max_rel_error);
    }
    detail += std::string(detail.empty() ? "" : "; ") + "depth " + std::to_string(depth) + ": " + row;
  }
  return {pass, "errors at |log(q/Delta^l)| = 0, 1e-4, 1e-3, 1e-2, 5e-2 nondecreasing: " + detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {"level-table", 1.0, level_table_criterion},
      {"transform-equivalence", 30.0, transform_equivalence_criterion},
      {"redistribution", 0.0, redistribution_criterion},
      {"tower-reuse-trace", 0.0, tower_reuse_criterion},
      {"planner-presets", 0.0, preset_criterion},
      {"polynomial-fit", 0.0, poly_fit_criterion},
      {"lemma-suite", 10.0, lemma_criterion},
      {"clustering", 0.0, clustering_criterion},
      {"simulator-fidelity", 120.0, simulator_criterion},
      {"error-probe", 0.0, probe_criterion},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failures = 0, ran = 0;
  for (const auto& c : criteria) {
    if (!only.empty() && c.name != only) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_s == 0.0 || secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failures += !pass;
    std::string timing = fmt("%.2f s", secs);
    if (c.budget_s > 0) timing += fmt(" / %.0f s", c.budget_s);
    std::printf("%s  %-22s %s  [%s]\n", pass ? "PASS" : "FAIL", c.name.c_str(), o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
  }
  if (ran == 0) {
    std::fprintf(stderr, "unknown criterion '%s'\n", only.c_str());
    return 2;
  }
  std::printf("%d/%d criteria pass\n", ran - failures, ran);
  return failures == 0 ? 0 : 1;
}
