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

#include "polyhe/graph/resnet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include "polyhe/errors.hpp"
#include "polyhe/graph/reference.hpp"
#include "polyhe/poly/fixed_point_poly.hpp"

namespace polyhe {

namespace {

struct StageSpec {
  std::size_t blocks;
  std::size_t width_mult;
  std::size_t stride;
};

std::vector<StageSpec> stages_for(ResNetVariant v) {
  switch (v) {
    case ResNetVariant::kRN18:
      return {{2, 1, 1}, {2, 2, 2}, {2, 4, 2}, {2, 8, 2}};
    case ResNetVariant::kRN20:
      return {{3, 1, 1}, {3, 2, 2}, {3, 4, 2}};
    case ResNetVariant::kRN32:
      return {{5, 1, 1}, {5, 2, 2}, {5, 4, 2}};
  }
  throw Error("unknown ResNet variant");
}

class Builder {
 public:
  Builder(const ResNetOptions& opts, std::vector<double> act)
      : rng_(opts.seed), act_(std::move(act)) {}

  ModelGraph& graph() { return g_; }
  // BN id -> node whose per-channel mean the BN output is shifted against.
  const std::map<int, int>& centering() const { return centering_; }

  int conv(int in, std::size_t cin, std::size_t cout, std::size_t k, std::size_t stride) {
    ConvNode c;
    c.in_channels = cin;
    c.out_channels = cout;
    c.kernel_h = c.kernel_w = k;
    c.stride = stride;
    c.padding = k / 2;
    const double bound = std::sqrt(3.0 / static_cast<double>(cin * k * k));
    std::uniform_real_distribution<double> w(-bound, bound);
    std::uniform_real_distribution<double> b(-0.1, 0.1);
    c.weights.resize(cout * cin * k * k);
    for (double& v : c.weights) v = w(rng_);
    c.bias.resize(cout);
    for (double& v : c.bias) v = b(rng_);
    return g_.add_node(std::move(c), {in});
  }

  int bn(int in, std::size_t channels, int center_against = -1) {
    BatchNormNode n;
    std::uniform_real_distribution<double> gamma(0.5, 0.9);
    std::uniform_real_distribution<double> beta(-0.1, 0.1);
    std::uniform_real_distribution<double> mean(-0.2, 0.2);
    std::uniform_real_distribution<double> sd(0.5, 1.5);
    for (std::size_t c = 0; c < channels; ++c) {
      n.gamma.push_back(gamma(rng_));
      n.beta.push_back(beta(rng_));
      n.mean.push_back(mean(rng_));
      n.stddev.push_back(sd(rng_));
    }
    int id = g_.add_node(std::move(n), {in});
    if (center_against >= 0) centering_[id] = center_against;
    return id;
  }

  int act(int in) { return g_.add_node(PolyActNode::shared(act_), {in}); }

  int linear(int in, std::size_t features, std::size_t classes) {
    LinearNode l;
    l.in_features = features;
    l.out_features = classes;
    const double bound = 1.0 / std::sqrt(static_cast<double>(features));
    std::uniform_real_distribution<double> w(-bound, bound);
    l.weights.resize(features * classes);
    for (double& v : l.weights) v = w(rng_);
    l.bias.resize(classes);
    for (double& v : l.bias) v = w(rng_);
    return g_.add_node(std::move(l), {in});
  }

  std::mt19937_64& rng() { return rng_; }

 private:
  ModelGraph g_;
  std::mt19937_64 rng_;
  std::vector<double> act_;
  std::map<int, int> centering_;
};

// Sets each batch-norm's statistics from its input on a calibration batch,
// evaluated in topological order. The spread is the largest absolute
// deviation from the mean, doubled, so calibrated outputs stay within
// [-gamma / 2, gamma / 2] and pre-activations remain inside the activation's
// fitting interval.
void calibrate(ModelGraph& g, const std::map<int, int>& centering, const TensorShape& input,
               std::size_t samples, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::map<int, Tensor>> values(samples);
  for (auto& v : values) {
    Tensor x(input);
    for (double& d : x.data) d = u(rng);
    v[g.input_id()] = std::move(x);
  }
  for (int id : g.topological_order()) {
    Node& n = g.mutable_node(id);
    if (n.kind() == NodeKind::kInput) continue;
    if (n.kind() == NodeKind::kBatchNorm) {
      auto& bn = n.as<BatchNormNode>();
      const auto center = centering.find(id);
      for (std::size_t c = 0; c < bn.channels(); ++c) {
        double sum = 0.0, shift = 0.0;
        std::size_t count = 0;
        for (auto& v : values) {
          const Tensor& t = v.at(n.inputs[0]);
          const std::size_t plane = t.shape.height * t.shape.width;
          for (std::size_t k = 0; k < plane; ++k) sum += t.data[c * plane + k];
          if (center != centering.end()) {
            const Tensor& y = v.at(center->second);
            for (std::size_t k = 0; k < plane; ++k) shift += y.data[c * plane + k];
          }
          count += plane;
        }
        const double mean = sum / static_cast<double>(count);
        double spread = 0.0;
        for (auto& v : values) {
          const Tensor& t = v.at(n.inputs[0]);
          const std::size_t plane = t.shape.height * t.shape.width;
          for (std::size_t k = 0; k < plane; ++k) {
            spread = std::max(spread, std::fabs(t.data[c * plane + k] - mean));
          }
        }
        bn.mean[c] = mean;
        bn.stddev[c] = 2.0 * spread + 1e-6;
        if (center != centering.end()) bn.beta[c] = -shift / static_cast<double>(count);
      }
    }
    for (auto& v : values) {
      std::vector<const Tensor*> args;
      for (int in : n.inputs) args.push_back(&v.at(in));
      v[id] = evaluate_node(n, args);
    }
  }
}

}  // namespace

ResNetVariant resnet_variant_from_string(const std::string& name) {
  if (name == "rn18") return ResNetVariant::kRN18;
  if (name == "rn20") return ResNetVariant::kRN20;
  if (name == "rn32") return ResNetVariant::kRN32;
  throw Error("unknown ResNet variant '" + name + "' (expected rn18, rn20 or rn32)");
}

const char* to_string(ResNetVariant v) {
  switch (v) {
    case ResNetVariant::kRN18:
      return "rn18";
    case ResNetVariant::kRN20:
      return "rn20";
    case ResNetVariant::kRN32:
      return "rn32";
  }
  return "?";
}

std::vector<double> default_activation(int degree) {
  if (degree != 2 && degree != 4) throw Error("activation degree must be 2 or 4");
  return fit_relu_poly(degree, 2.0, 10).poly.real_coeffs();
}

ModelGraph build_resnet_graph(const ResNetOptions& opts) {
  auto act = opts.act_coeffs.empty() ? default_activation(opts.act_degree) : opts.act_coeffs;
  if (act.size() < 2) throw Error("activation needs degree >= 1");
  Builder b(opts, act);
  ModelGraph& g = b.graph();

  int x = g.add_node(InputNode{opts.input});
  std::size_t channels = opts.width;
  x = b.act(b.bn(b.conv(x, opts.input.channels, channels, 3, 1), channels));
  std::size_t h = opts.input.height, w = opts.input.width;

  for (const auto& stage : stages_for(opts.variant)) {
    for (std::size_t blk = 0; blk < stage.blocks; ++blk) {
      const std::size_t stride = blk == 0 ? stage.stride : 1;
      const std::size_t out = opts.width * stage.width_mult;
      int shortcut = x;
      if (stride != 1 || out != channels) {
        shortcut = b.bn(b.conv(x, channels, out, 1, stride), out);
      }
      int y = b.act(b.bn(b.conv(x, channels, out, 3, stride), out));
      y = b.bn(b.conv(y, out, out, 3, 1), out, shortcut);
      int sum = g.add_node(AddNode{}, {y, shortcut});
      x = b.act(sum);
      channels = out;
      h = (h + 2 - 3) / stride + 1;
      w = (w + 2 - 3) / stride + 1;
    }
  }
  int pool = g.add_node(AvgPoolNode{h * w, 1.0 / static_cast<double>(h * w)}, {x});
  int fc = b.linear(pool, channels, opts.classes);
  g.add_node(OutputNode{}, {fc});

  if (opts.calibrate) calibrate(g, b.centering(), opts.input, opts.calibration_samples, b.rng());
  g.validate();
  return g;
}

}  // namespace polyhe
