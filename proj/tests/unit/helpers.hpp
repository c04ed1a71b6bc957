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

#include <random>

#include "polyhe/graph/graph.hpp"
#include "polyhe/graph/resnet.hpp"

namespace polyhe::testing {

inline BatchNormNode random_bn(std::size_t channels, std::mt19937_64& rng) {
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

inline ConvNode random_conv(std::size_t out, std::size_t in, std::size_t k, std::size_t stride,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  ConvNode c{out, in, k, k, stride, k / 2, {}, {}};
  c.weights.resize(out * in * k * k);
  for (auto& w : c.weights) w = u(rng);
  for (std::size_t o = 0; o < out; ++o) c.bias.push_back(u(rng));
  return c;
}

inline PolyActNode random_act(int degree, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<double> row(static_cast<std::size_t>(degree) + 1);
  for (auto& c : row) c = u(rng);
  row.back() = 0.25 + std::fabs(row.back());
  return PolyActNode::shared(row);
}

/// Input(C,H,W) -> conv-bn-act -> conv-bn (+ conv-bn shortcut) -> Add -> act
/// -> conv-bn (+ identity shortcut) -> Add -> act -> pool -> linear.
inline ModelGraph mini_resnet(std::uint64_t seed, std::size_t channels = 2, std::size_t hw = 4) {
  std::mt19937_64 rng(seed);
  ModelGraph g;
  int in = g.add_node(InputNode{{channels, hw, hw}});
  int c1 = g.add_node(random_conv(channels, channels, 3, 1, rng), {in});
  int b1 = g.add_node(random_bn(channels, rng), {c1});
  int a1 = g.add_node(random_act(2, rng), {b1});
  int c2 = g.add_node(random_conv(channels, channels, 3, 1, rng), {a1});
  int b2 = g.add_node(random_bn(channels, rng), {c2});
  int cs = g.add_node(random_conv(channels, channels, 1, 1, rng), {a1});
  int bs = g.add_node(random_bn(channels, rng), {cs});
  int add1 = g.add_node(AddNode{}, {b2, bs});
  int a2 = g.add_node(random_act(2, rng), {add1});
  int c3 = g.add_node(random_conv(channels, channels, 3, 1, rng), {a2});
  int b3 = g.add_node(random_bn(channels, rng), {c3});
  int add2 = g.add_node(AddNode{}, {b3, a2});
  int a3 = g.add_node(random_act(2, rng), {add2});
  int pool = g.add_node(AvgPoolNode{hw * hw, 1.0 / static_cast<double>(hw * hw)}, {a3});
  std::uniform_real_distribution<double> u(-1, 1);
  LinearNode lin{channels, 3, {}, {}};
  for (std::size_t k = 0; k < 3 * channels; ++k) lin.weights.push_back(u(rng));
  lin.bias = {u(rng), u(rng), u(rng)};
  int l = g.add_node(lin, {pool});
  g.add_node(OutputNode{}, {l});
  g.validate();
  return g;
}

inline ResNetOptions fixture_options(ResNetVariant v, std::uint64_t seed = 1) {
  ResNetOptions o;
  o.variant = v;
  o.width = 4;
  o.input = {3, 8, 8};
  o.seed = seed;
  return o;
}

}  // namespace polyhe::testing
