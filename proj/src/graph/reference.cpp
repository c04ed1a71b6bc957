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

#include "polyhe/graph/reference.hpp"

#include "polyhe/errors.hpp"
#include "polyhe/poly/fixed_point_poly.hpp"

namespace polyhe {

namespace {

Tensor conv2d(const ConvNode& c, const Tensor& x) {
  const auto& s = x.shape;
  TensorShape out_shape{c.out_channels, (s.height + 2 * c.padding - c.kernel_h) / c.stride + 1,
                        (s.width + 2 * c.padding - c.kernel_w) / c.stride + 1};
  Tensor y(out_shape);
  const auto pad = static_cast<std::ptrdiff_t>(c.padding);
  for (std::size_t o = 0; o < c.out_channels; ++o) {
    for (std::size_t oh = 0; oh < out_shape.height; ++oh) {
      for (std::size_t ow = 0; ow < out_shape.width; ++ow) {
        double acc = c.bias[o];
        for (std::size_t i = 0; i < c.in_channels; ++i) {
          for (std::size_t kh = 0; kh < c.kernel_h; ++kh) {
            auto ih = static_cast<std::ptrdiff_t>(oh * c.stride + kh) - pad;
            if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(s.height)) continue;
            for (std::size_t kw = 0; kw < c.kernel_w; ++kw) {
              auto iw = static_cast<std::ptrdiff_t>(ow * c.stride + kw) - pad;
              if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(s.width)) continue;
              acc += c.weight(o, i, kh, kw) * x.at(i, static_cast<std::size_t>(ih),
                                                   static_cast<std::size_t>(iw));
            }
          }
        }
        y.at(o, oh, ow) = acc;
      }
    }
  }
  return y;
}

}  // namespace

Tensor evaluate_node(const Node& node, const std::vector<const Tensor*>& inputs) {
  switch (node.kind()) {
    case NodeKind::kInput:
      throw Error("evaluate_node: Input has no computation");
    case NodeKind::kOutput:
      return *inputs[0];
    case NodeKind::kConv:
      return conv2d(node.as<ConvNode>(), *inputs[0]);
    case NodeKind::kBatchNorm: {
      const auto& bn = node.as<BatchNormNode>();
      Tensor y = *inputs[0];
      const std::size_t plane = y.shape.height * y.shape.width;
      for (std::size_t c = 0; c < y.shape.channels; ++c) {
        const double b1 = bn.slope(c);
        const double b0 = bn.intercept(c);
        for (std::size_t k = 0; k < plane; ++k) y.data[c * plane + k] = b1 * y.data[c * plane + k] + b0;
      }
      return y;
    }
    case NodeKind::kPolyAct: {
      const auto& act = node.as<PolyActNode>();
      Tensor y = *inputs[0];
      const std::size_t plane = y.shape.height * y.shape.width;
      for (std::size_t c = 0; c < y.shape.channels; ++c) {
        const auto& row = act.row(c);
        for (std::size_t k = 0; k < plane; ++k) y.data[c * plane + k] = eval_real_poly(row, y.data[c * plane + k]);
      }
      return y;
    }
    case NodeKind::kPolySkip: {
      const auto& s = node.as<PolySkipNode>();
      Tensor y = *inputs[0];
      const std::size_t plane = y.shape.height * y.shape.width;
      for (std::size_t k = 0; k < y.data.size(); ++k) {
        y.data[k] = s.eval(k / plane, inputs[0]->data[k], inputs[1]->data[k]);
      }
      return y;
    }
    case NodeKind::kAdd: {
      const auto& a = node.as<AddNode>();
      Tensor y = *inputs[0];
      const std::size_t plane = y.shape.height * y.shape.width;
      for (std::size_t k = 0; k < y.data.size(); ++k) {
        y.data[k] = a.wx(k / plane) * inputs[0]->data[k] + a.wy(k / plane) * inputs[1]->data[k];
      }
      return y;
    }
    case NodeKind::kAvgPool: {
      const auto& p = node.as<AvgPoolNode>();
      const Tensor& x = *inputs[0];
      Tensor y({x.shape.channels, 1, 1});
      const std::size_t plane = x.shape.height * x.shape.width;
      for (std::size_t c = 0; c < x.shape.channels; ++c) {
        double acc = 0.0;
        for (std::size_t k = 0; k < plane; ++k) acc += x.data[c * plane + k];
        y.data[c] = p.scale * acc;
      }
      return y;
    }
    case NodeKind::kLinear: {
      const auto& l = node.as<LinearNode>();
      const Tensor& x = *inputs[0];
      Tensor y({l.out_features, 1, 1});
      for (std::size_t o = 0; o < l.out_features; ++o) {
        double acc = l.bias[o];
        for (std::size_t i = 0; i < l.in_features; ++i) acc += l.weight(o, i) * x.data[i];
        y.data[o] = acc;
      }
      return y;
    }
  }
  throw Error("evaluate_node: unknown node kind");
}

std::map<int, Tensor> reference_eval_all(const ModelGraph& g, const Tensor& input) {
  const auto& in_node = g.node(g.input_id()).as<InputNode>();
  if (!(input.shape == in_node.shape)) {
    throw ShapeError("input shape " + input.shape.str() + " does not match model input " +
                     in_node.shape.str());
  }
  if (input.data.size() != input.shape.size()) throw ShapeError("input data length mismatch");
  std::map<int, Tensor> values;
  for (int id : g.topological_order()) {
    const Node& n = g.node(id);
    if (n.kind() == NodeKind::kInput) {
      values[id] = input;
      continue;
    }
    std::vector<const Tensor*> args;
    for (int in : n.inputs) args.push_back(&values.at(in));
    values[id] = evaluate_node(n, args);
  }
  return values;
}

std::vector<double> reference_eval(const ModelGraph& g, const Tensor& input) {
  auto values = reference_eval_all(g, input);
  return values.at(g.output_id()).data;
}

}  // namespace polyhe
