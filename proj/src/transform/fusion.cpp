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

#include "polyhe/transform/fusion.hpp"

#include <algorithm>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

void require_quadratic(const PolyActNode& act, const char* what) {
  if (act.degree() != 2) {
    throw PatternError(std::string(what) + ": activation degree is " + std::to_string(act.degree()) +
                       ", expected 2");
  }
}

double coef(const std::vector<double>& row, std::size_t k) { return k < row.size() ? row[k] : 0.0; }

std::size_t rows_for(std::initializer_list<std::size_t> sizes) {
  std::size_t r = 1;
  for (auto s : sizes) {
    if (s == 1) continue;
    if (r != 1 && r != s) throw PatternError("per-channel parameter counts disagree");
    r = s;
  }
  return r;
}

bool single_consumer(const ModelGraph& g, int producer, int consumer) {
  auto c = g.consumers(producer);
  return c.size() == 1 && c[0] == consumer;
}

}  // namespace

const char* to_string(FusionRule rule) {
  switch (rule) {
    case FusionRule::kConvBn:
      return "conv-bn";
    case FusionRule::kSkip:
      return "skip";
    case FusionRule::kBnAct:
      return "bn-act";
  }
  return "?";
}

PolyActNode fuse_bn_act(const BatchNormNode& bn, const PolyActNode& act) {
  require_quadratic(act, "bn-act fusion");
  const std::size_t rows = rows_for({bn.channels(), act.rows()});
  PolyActNode out;
  for (std::size_t c = 0; c < rows; ++c) {
    const double b1 = bn.slope(bn.channels() == 1 ? 0 : c);
    const double b0 = bn.intercept(bn.channels() == 1 ? 0 : c);
    const auto& r = act.row(c);
    const double c0 = coef(r, 0), c1 = coef(r, 1), c2 = coef(r, 2);
    out.coeffs.push_back({b0 * b0 * c2 + b0 * c1 + c0, b1 * (2 * b0 * c2 + c1), b1 * b1 * c2});
  }
  return out;
}

ConvNode fuse_bn_conv(const ConvNode& conv, const BatchNormNode& bn) {
  if (bn.channels() != conv.out_channels) {
    throw PatternError("conv-bn fusion: batch norm has " + std::to_string(bn.channels()) +
                       " channels, conv has " + std::to_string(conv.out_channels) + " outputs");
  }
  ConvNode out = conv;
  const std::size_t per_out = conv.in_channels * conv.kernel_h * conv.kernel_w;
  for (std::size_t o = 0; o < conv.out_channels; ++o) {
    const double b1 = bn.slope(o);
    for (std::size_t k = 0; k < per_out; ++k) out.weights[o * per_out + k] *= b1;
    out.bias[o] = b1 * conv.bias[o] + bn.intercept(o);
  }
  return out;
}

PolySkipNode fuse_skip(const BatchNormNode* bn_x, const BatchNormNode* bn_y, const PolyActNode& act,
                       const AddNode* add) {
  require_quadratic(act, "skip fusion");
  const AddNode unit;
  if (!add) add = &unit;
  const std::size_t rows =
      rows_for({bn_x ? bn_x->channels() : 1, bn_y ? bn_y->channels() : 1, act.rows(),
                add->weight_x.size(), add->weight_y.size()});
  auto affine = [](const BatchNormNode* bn, std::size_t c) -> std::pair<double, double> {
    if (!bn) return {1.0, 0.0};
    std::size_t ch = bn->channels() == 1 ? 0 : c;
    return {bn->slope(ch), bn->intercept(ch)};
  };

  PolySkipNode out;
  for (std::size_t c = 0; c < rows; ++c) {
    auto [x1, x0] = affine(bn_x, c);
    auto [y1, y0] = affine(bn_y, c);
    const double ax = add->wx(c) * x1, ay = add->wy(c) * y1;
    const double b = add->wx(c) * x0 + add->wy(c) * y0;
    const auto& r = act.row(c);
    const double c0 = coef(r, 0), c1 = coef(r, 1), c2 = coef(r, 2);
    PolySkipNode::Terms t;
    t[{2, 0}] = c2 * ax * ax;
    t[{0, 2}] = c2 * ay * ay;
    t[{1, 1}] = 2 * c2 * ax * ay;
    t[{1, 0}] = 2 * c2 * ax * b + c1 * ax;
    t[{0, 1}] = 2 * c2 * ay * b + c1 * ay;
    t[{0, 0}] = c2 * b * b + c1 * b + c0;
    out.coeffs.push_back(std::move(t));
  }
  return out;
}

PolySkipNode fuse_skip_bn_bn(const BatchNormNode& bn_x, const BatchNormNode& bn_y,
                             const PolyActNode& act) {
  return fuse_skip(&bn_x, &bn_y, act);
}

PolySkipNode fuse_skip_identity(const BatchNormNode& bn_x, const PolyActNode& act) {
  return fuse_skip(&bn_x, nullptr, act);
}

namespace {

bool try_conv_bn(ModelGraph& g, std::vector<Rewrite>& log) {
  for (const auto& [id, n] : g.nodes()) {
    if (n.kind() != NodeKind::kBatchNorm) continue;
    int p = n.inputs[0];
    if (g.node(p).kind() != NodeKind::kConv || !single_consumer(g, p, id)) continue;
    ConvNode fused = fuse_bn_conv(g.node(p).as<ConvNode>(), n.as<BatchNormNode>());
    const int bn_id = id;
    g.mutable_node(p).payload = std::move(fused);
    g.redirect_consumers(bn_id, p);
    g.remove_node(bn_id);
    log.push_back({to_string(FusionRule::kConvBn), {p, bn_id}});
    return true;
  }
  return false;
}

bool try_bn_act(ModelGraph& g, std::vector<Rewrite>& log) {
  for (const auto& [id, n] : g.nodes()) {
    if (n.kind() != NodeKind::kPolyAct || n.as<PolyActNode>().degree() != 2) continue;
    int b = n.inputs[0];
    if (g.node(b).kind() != NodeKind::kBatchNorm || !single_consumer(g, b, id)) continue;
    PolyActNode fused = fuse_bn_act(g.node(b).as<BatchNormNode>(), n.as<PolyActNode>());
    const int act_id = id;
    Node& act = g.mutable_node(act_id);
    act.payload = std::move(fused);
    act.inputs = {g.node(b).inputs[0]};
    g.remove_node(b);
    log.push_back({to_string(FusionRule::kBnAct), {act_id, b}});
    return true;
  }
  return false;
}

bool try_skip(ModelGraph& g, std::vector<Rewrite>& log) {
  for (const auto& [id, n] : g.nodes()) {
    if (n.kind() != NodeKind::kPolyAct || n.as<PolyActNode>().degree() != 2) continue;
    int s = n.inputs[0];
    if (g.node(s).kind() != NodeKind::kAdd || !single_consumer(g, s, id)) continue;
    const Node& add = g.node(s);
    std::vector<int> absorbed;
    const BatchNormNode* bns[2] = {nullptr, nullptr};
    int sources[2];
    for (int k = 0; k < 2; ++k) {
      int p = add.inputs[k];
      sources[k] = p;
      if (g.node(p).kind() == NodeKind::kBatchNorm && single_consumer(g, p, s)) {
        bns[k] = &g.node(p).as<BatchNormNode>();
        sources[k] = g.node(p).inputs[0];
        absorbed.push_back(p);
      }
    }
    PolySkipNode fused = fuse_skip(bns[0], bns[1], n.as<PolyActNode>(), &add.as<AddNode>());
    const int act_id = id;
    Node& act = g.mutable_node(act_id);
    act.payload = std::move(fused);
    act.inputs = {sources[0], sources[1]};
    g.remove_node(s);
    for (int b : absorbed) g.remove_node(b);
    Rewrite r{to_string(FusionRule::kSkip), {act_id, s}};
    r.nodes.insert(r.nodes.end(), absorbed.begin(), absorbed.end());
    log.push_back(std::move(r));
    return true;
  }
  return false;
}

}  // namespace

std::vector<Rewrite> fuse_graph(ModelGraph& g, const std::vector<FusionRule>& order) {
  std::vector<Rewrite> log;
  for (bool progress = true; progress;) {
    progress = false;
    for (FusionRule rule : order) {
      bool applied = false;
      switch (rule) {
        case FusionRule::kConvBn:
          applied = try_conv_bn(g, log);
          break;
        case FusionRule::kSkip:
          applied = try_skip(g, log);
          break;
        case FusionRule::kBnAct:
          applied = try_bn_act(g, log);
          break;
      }
      if (applied) {
        progress = true;
        break;
      }
    }
  }
  return log;
}

}  // namespace polyhe
