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

#include "polyhe/graph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

constexpr const char* kKindNames[] = {"Input",   "Conv", "BatchNorm", "PolyAct", "PolySkip",
                                      "AvgPool", "Add",  "Linear",    "Output"};

void require(bool ok, int id, const std::string& what) {
  if (!ok) throw ValidationError(what, id);
}

}  // namespace

const char* to_string(NodeKind kind) { return kKindNames[static_cast<int>(kind)]; }

NodeKind node_kind_from_string(const std::string& name) {
  for (int i = 0; i < 9; ++i) {
    if (name == kKindNames[i]) return static_cast<NodeKind>(i);
  }
  throw ParseError("unknown node kind '" + name + "'");
}

std::size_t expected_arity(NodeKind kind) {
  switch (kind) {
    case NodeKind::kInput:
      return 0;
    case NodeKind::kPolySkip:
    case NodeKind::kAdd:
      return 2;
    default:
      return 1;
  }
}

void BatchNormNode::set_affine(std::size_t c, double new_slope, double new_intercept) {
  gamma[c] = new_slope * stddev[c];
  beta[c] = new_intercept + new_slope * mean[c];
}

bool BatchNormNode::slopes_unit() const {
  for (std::size_t c = 0; c < channels(); ++c) {
    if (slope(c) != 1.0) return false;
  }
  return true;
}

int PolyActNode::degree() const {
  int d = 0;
  for (const auto& r : coeffs) d = std::max(d, static_cast<int>(r.size()) - 1);
  return d;
}

bool PolyActNode::monic() const {
  for (const auto& r : coeffs) {
    if (r.empty() || r.back() != 1.0) return false;
  }
  return true;
}

int PolySkipNode::degree() const {
  int d = 0;
  for (const auto& r : coeffs) {
    for (const auto& [ij, v] : r) {
      if (v != 0.0) d = std::max(d, ij.first + ij.second);
    }
  }
  return d;
}

double PolySkipNode::coeff(std::size_t c, int i, int j) const {
  const auto& r = row(c);
  auto it = r.find({i, j});
  return it == r.end() ? 0.0 : it->second;
}

bool PolySkipNode::monic_x() const {
  for (std::size_t c = 0; c < rows(); ++c) {
    if (leading_x(c) != 1.0) return false;
  }
  return true;
}

double PolySkipNode::eval(std::size_t c, double x, double y) const {
  double acc = 0.0;
  for (const auto& [ij, v] : row(c)) {
    acc += v * std::pow(x, ij.first) * std::pow(y, ij.second);
  }
  return acc;
}

bool AddNode::unit(const std::vector<double>& w) {
  return std::all_of(w.begin(), w.end(), [](double v) { return v == 1.0; });
}

int ModelGraph::add_node(NodePayload payload, std::vector<int> inputs) {
  int id = next_id_;
  insert_node(id, std::move(payload), std::move(inputs));
  return id;
}

void ModelGraph::insert_node(int id, NodePayload payload, std::vector<int> inputs) {
  if (id < 0) throw ValidationError("negative node id", id);
  if (nodes_.count(id)) throw ValidationError("duplicate node id", id);
  Node n;
  n.id = id;
  n.inputs = std::move(inputs);
  n.payload = std::move(payload);
  nodes_.emplace(id, std::move(n));
  next_id_ = std::max(next_id_, id + 1);
}

void ModelGraph::remove_node(int id) {
  if (!nodes_.erase(id)) throw ValidationError("no such node", id);
}

const Node& ModelGraph::node(int id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ValidationError("no such node", id);
  return it->second;
}

Node& ModelGraph::mutable_node(int id) {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw ValidationError("no such node", id);
  return it->second;
}

std::vector<int> ModelGraph::consumers(int id) const {
  std::vector<int> out;
  for (const auto& [nid, n] : nodes_) {
    for (int in : n.inputs) {
      if (in == id) out.push_back(nid);
    }
  }
  return out;
}

void ModelGraph::replace_input(int consumer, int old_producer, int new_producer) {
  for (int& in : mutable_node(consumer).inputs) {
    if (in == old_producer) in = new_producer;
  }
}

void ModelGraph::redirect_consumers(int old_producer, int new_producer) {
  for (auto& [nid, n] : nodes_) {
    if (nid == new_producer) continue;
    for (int& in : n.inputs) {
      if (in == old_producer) in = new_producer;
    }
  }
}

std::vector<int> ModelGraph::topological_order() const {
  std::map<int, int> indegree;
  std::map<int, std::vector<int>> succ;
  for (const auto& [id, n] : nodes_) {
    indegree[id] += 0;
    for (int in : n.inputs) {
      if (!nodes_.count(in)) throw ValidationError("input " + std::to_string(in) + " does not exist", id);
      ++indegree[id];
      succ[in].push_back(id);
    }
  }
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push(id);
  }
  std::vector<int> order;
  order.reserve(nodes_.size());
  while (!ready.empty()) {
    int id = ready.top();
    ready.pop();
    order.push_back(id);
    for (int s : succ[id]) {
      if (--indegree[s] == 0) ready.push(s);
    }
  }
  if (order.size() != nodes_.size()) {
    for (const auto& [id, deg] : indegree) {
      if (deg > 0) throw ValidationError("graph contains a cycle", id);
    }
  }
  return order;
}

int ModelGraph::input_id() const {
  for (const auto& [id, n] : nodes_) {
    if (n.kind() == NodeKind::kInput) return id;
  }
  throw ValidationError("graph has no Input node");
}

int ModelGraph::output_id() const {
  for (const auto& [id, n] : nodes_) {
    if (n.kind() == NodeKind::kOutput) return id;
  }
  throw ValidationError("graph has no Output node");
}

std::size_t ModelGraph::count(NodeKind kind) const {
  std::size_t c = 0;
  for (const auto& [id, n] : nodes_) c += n.kind() == kind;
  return c;
}

void ModelGraph::validate() const {
  if (count(NodeKind::kInput) != 1) throw ValidationError("graph must have exactly one Input node");
  if (count(NodeKind::kOutput) != 1) throw ValidationError("graph must have exactly one Output node");

  for (const auto& [id, n] : nodes_) {
    require(n.inputs.size() == expected_arity(n.kind()), id,
            std::string(to_string(n.kind())) + " expects " +
                std::to_string(expected_arity(n.kind())) + " inputs, has " +
                std::to_string(n.inputs.size()));
    for (int in : n.inputs) {
      require(nodes_.count(in) != 0, id, "input " + std::to_string(in) + " does not exist");
      require(node(in).kind() != NodeKind::kOutput, id, "Output node cannot be consumed");
    }
    if (n.kind() != NodeKind::kOutput) {
      require(!consumers(id).empty(), id, "node output is never consumed");
    }

    std::visit(
        [&](const auto& p) {
          using T = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<T, InputNode>) {
            require(p.shape.channels >= 1 && p.shape.height >= 1 && p.shape.width >= 1, id,
                    "input dimensions must be >= 1");
          } else if constexpr (std::is_same_v<T, ConvNode>) {
            require(p.out_channels >= 1 && p.in_channels >= 1, id, "conv channel counts must be >= 1");
            require(p.kernel_h >= 1 && p.kernel_w >= 1, id, "kernel dims must be >= 1");
            require(p.stride >= 1, id, "stride must be >= 1");
            require(p.weights.size() == p.out_channels * p.in_channels * p.kernel_h * p.kernel_w, id,
                    "conv weight tensor size mismatch");
            require(p.bias.size() == p.out_channels, id, "conv bias length must equal out channels");
          } else if constexpr (std::is_same_v<T, BatchNormNode>) {
            auto c = p.gamma.size();
            require(c >= 1 && p.beta.size() == c && p.mean.size() == c && p.stddev.size() == c, id,
                    "batchnorm parameter lengths differ");
            for (double s : p.stddev) require(s > 0, id, "batchnorm std must be > 0");
          } else if constexpr (std::is_same_v<T, PolyActNode>) {
            require(p.rows() >= 1, id, "activation has no coefficients");
            for (const auto& r : p.coeffs) {
              require(r.size() == p.coeffs[0].size(), id, "activation rows differ in degree");
            }
            require(p.degree() >= 1, id, "activation degree must be >= 1");
          } else if constexpr (std::is_same_v<T, PolySkipNode>) {
            require(p.rows() >= 1, id, "polyskip has no coefficients");
            require(p.degree() >= 1, id, "polyskip degree must be >= 1");
            for (const auto& r : p.coeffs) {
              for (const auto& [ij, v] : r) {
                require(ij.first >= 0 && ij.second >= 0, id, "polyskip exponents must be >= 0");
              }
            }
          } else if constexpr (std::is_same_v<T, AvgPoolNode>) {
            require(p.kernel >= 1, id, "pool kernel must be >= 1");
            require(p.scale > 0, id, "pool divisor must be > 0");
          } else if constexpr (std::is_same_v<T, LinearNode>) {
            require(p.in_features >= 1 && p.out_features >= 1, id, "linear sizes must be >= 1");
            require(p.weights.size() == p.in_features * p.out_features, id,
                    "linear weight matrix size mismatch");
            require(p.bias.size() == p.out_features, id, "linear bias length mismatch");
          } else if constexpr (std::is_same_v<T, AddNode>) {
            require(!p.weight_x.empty() && !p.weight_y.empty(), id, "add weights are empty");
            for (double w : p.weight_x) require(std::isfinite(w), id, "add weights must be finite");
            for (double w : p.weight_y) require(std::isfinite(w), id, "add weights must be finite");
          }
        },
        n.payload);
  }
  // Cycle detection and shape checks.
  (void)topological_order();
  (void)infer_shapes();
}

std::map<int, TensorShape> ModelGraph::infer_shapes() const {
  std::map<int, TensorShape> shapes;
  for (int id : topological_order()) {
    const Node& n = node(id);
    auto in_shape = [&](std::size_t k) { return shapes.at(n.inputs.at(k)); };
    TensorShape out;
    switch (n.kind()) {
      case NodeKind::kInput:
        out = n.as<InputNode>().shape;
        break;
      case NodeKind::kConv: {
        const auto& c = n.as<ConvNode>();
        auto s = in_shape(0);
        require(s.channels == c.in_channels, id,
                "conv expects " + std::to_string(c.in_channels) + " input channels, got " + s.str());
        require(s.height + 2 * c.padding >= c.kernel_h && s.width + 2 * c.padding >= c.kernel_w, id,
                "kernel larger than padded input " + s.str());
        out.channels = c.out_channels;
        out.height = (s.height + 2 * c.padding - c.kernel_h) / c.stride + 1;
        out.width = (s.width + 2 * c.padding - c.kernel_w) / c.stride + 1;
        break;
      }
      case NodeKind::kBatchNorm:
        out = in_shape(0);
        require(out.channels == n.as<BatchNormNode>().channels(), id,
                "batchnorm channel count does not match input " + out.str());
        break;
      case NodeKind::kOutput:
        out = in_shape(0);
        break;
      case NodeKind::kPolyAct: {
        out = in_shape(0);
        auto rows = n.as<PolyActNode>().rows();
        require(rows == 1 || rows == out.channels, id,
                "activation has " + std::to_string(rows) + " rows for input " + out.str());
        break;
      }
      case NodeKind::kPolySkip:
      case NodeKind::kAdd: {
        out = in_shape(0);
        require(out == in_shape(1), id,
                "branch shapes differ: " + out.str() + " vs " + in_shape(1).str());
        std::size_t rows_x = 1, rows_y = 1;
        if (n.kind() == NodeKind::kPolySkip) {
          rows_x = rows_y = n.as<PolySkipNode>().rows();
        } else {
          rows_x = n.as<AddNode>().weight_x.size();
          rows_y = n.as<AddNode>().weight_y.size();
        }
        require((rows_x == 1 || rows_x == out.channels) && (rows_y == 1 || rows_y == out.channels), id,
                "per-channel parameters do not match input " + out.str());
        break;
      }
      case NodeKind::kAvgPool: {
        auto s = in_shape(0);
        require(n.as<AvgPoolNode>().kernel == s.height * s.width, id,
                "global pool kernel must equal the spatial size of " + s.str());
        out = {s.channels, 1, 1};
        break;
      }
      case NodeKind::kLinear: {
        const auto& l = n.as<LinearNode>();
        require(in_shape(0).size() == l.in_features, id,
                "linear expects " + std::to_string(l.in_features) + " features, got " +
                    in_shape(0).str());
        out = {l.out_features, 1, 1};
        break;
      }
    }
    shapes[id] = out;
  }
  return shapes;
}

}  // namespace polyhe
