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

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "polyhe/graph/tensor.hpp"

namespace polyhe {

enum class NodeKind {
  kInput,
  kConv,
  kBatchNorm,
  kPolyAct,
  kPolySkip,
  kAvgPool,
  kAdd,
  kLinear,
  kOutput,
};

const char* to_string(NodeKind kind);
NodeKind node_kind_from_string(const std::string& name);

struct InputNode {
  TensorShape shape;
};

/// 2-D convolution; weights in (out, in, kh, kw) order.
struct ConvNode {
  std::size_t out_channels = 1;
  std::size_t in_channels = 1;
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t stride = 1;
  std::size_t padding = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  std::size_t weight_index(std::size_t o, std::size_t i, std::size_t h, std::size_t w) const {
    return ((o * in_channels + i) * kernel_h + h) * kernel_w + w;
  }
  double weight(std::size_t o, std::size_t i, std::size_t h, std::size_t w) const {
    return weights[weight_index(o, i, h, w)];
  }
};

/// Per-channel batch normalization B(x) = b1 x + b0 with b1 = gamma / std and
/// b0 = beta - b1 * mean.
struct BatchNormNode {
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> mean;
  std::vector<double> stddev;

  std::size_t channels() const { return gamma.size(); }
  double slope(std::size_t c) const { return gamma[c] / stddev[c]; }
  double intercept(std::size_t c) const { return beta[c] - slope(c) * mean[c]; }
  /// Rewrites the parameters so the channel computes slope * x + intercept
  /// while keeping mean and std.
  void set_affine(std::size_t c, double slope, double intercept);
  bool slopes_unit() const;
};

/// Coordinate-wise polynomial sum c_k x^k (c_0 first). One coefficient row
/// per channel, or a single row shared by every channel.
struct PolyActNode {
  std::vector<std::vector<double>> coeffs;

  static PolyActNode shared(std::vector<double> row) { return {{std::move(row)}}; }
  std::size_t rows() const { return coeffs.size(); }
  const std::vector<double>& row(std::size_t c) const { return coeffs.size() == 1 ? coeffs[0] : coeffs[c]; }
  std::vector<double>& row(std::size_t c) { return coeffs.size() == 1 ? coeffs[0] : coeffs[c]; }
  int degree() const;
  bool monic() const;
};

/// Bivariate polynomial S(x, y) = sum c_ij x^i y^j; x is input 0, y input 1.
/// Rows follow the same per-channel convention as PolyActNode.
struct PolySkipNode {
  using Terms = std::map<std::pair<int, int>, double>;
  std::vector<Terms> coeffs;

  static PolySkipNode shared(Terms t) { return {{std::move(t)}}; }
  std::size_t rows() const { return coeffs.size(); }
  const Terms& row(std::size_t c) const { return coeffs.size() == 1 ? coeffs[0] : coeffs[c]; }
  Terms& row(std::size_t c) { return coeffs.size() == 1 ? coeffs[0] : coeffs[c]; }
  int degree() const;
  double coeff(std::size_t c, int i, int j) const;
  /// Coefficient of x^d, the term normalized by redistribution.
  double leading_x(std::size_t c) const { return coeff(c, degree(), 0); }
  bool monic_x() const;
  double eval(std::size_t c, double x, double y) const;
};

/// Global average pooling. `scale` multiplies the spatial sum; it is 1/kernel
/// until redistribution moves it into neighbouring nodes.
struct AvgPoolNode {
  std::size_t kernel = 1;
  double scale = 1.0;
};

/// Weighted sum of two inputs, per channel (one entry broadcasts).
struct AddNode {
  std::vector<double> weight_x{1.0};
  std::vector<double> weight_y{1.0};

  double wx(std::size_t c) const { return weight_x.size() == 1 ? weight_x[0] : weight_x[c]; }
  double wy(std::size_t c) const { return weight_y.size() == 1 ? weight_y[0] : weight_y[c]; }
  static bool unit(const std::vector<double>& w);
};

/// Fully connected layer on the flattened input; weight is (out x in).
struct LinearNode {
  std::size_t in_features = 1;
  std::size_t out_features = 1;
  std::vector<double> weights;
  std::vector<double> bias;
  double weight(std::size_t o, std::size_t i) const { return weights[o * in_features + i]; }
};

struct OutputNode {};

using NodePayload = std::variant<InputNode, ConvNode, BatchNormNode, PolyActNode,
                                 PolySkipNode, AvgPoolNode, AddNode, LinearNode,
                                 OutputNode>;

struct Node {
  int id = -1;
  std::vector<int> inputs;  // ordered producers
  NodePayload payload;

  NodeKind kind() const { return static_cast<NodeKind>(payload.index()); }
  template <typename T>
  T& as() { return std::get<T>(payload); }
  template <typename T>
  const T& as() const { return std::get<T>(payload); }
};

/// Expected number of producers for a node kind.
std::size_t expected_arity(NodeKind kind);

/// Directed acyclic computation graph with a single Input and Output node.
/// Ids are stable across rewrites; removed ids are never reused.
class ModelGraph {
 public:
  int add_node(NodePayload payload, std::vector<int> inputs = {});
  /// Inserts a node with a caller-chosen id (used by the loader).
  void insert_node(int id, NodePayload payload, std::vector<int> inputs);
  void remove_node(int id);

  bool contains(int id) const { return nodes_.count(id) != 0; }
  const Node& node(int id) const;
  Node& mutable_node(int id);
  const std::map<int, Node>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }

  /// Consumers of `id` in ascending id order; a consumer reading the same
  /// producer twice appears twice.
  std::vector<int> consumers(int id) const;
  /// Replaces every occurrence of `old_producer` in `consumer`'s inputs.
  void replace_input(int consumer, int old_producer, int new_producer);
  /// Redirects every consumer of `old_producer` to `new_producer`.
  void redirect_consumers(int old_producer, int new_producer);

  /// Kahn order with ties broken by smallest id. Throws ValidationError on a
  /// cycle.
  std::vector<int> topological_order() const;
  int input_id() const;
  int output_id() const;

  /// Checks structural invariants and shape consistency; throws
  /// ValidationError naming the offending node.
  void validate() const;
  /// Output shape of every node. Assumes a structurally valid graph.
  std::map<int, TensorShape> infer_shapes() const;

  std::size_t count(NodeKind kind) const;

 private:
  std::map<int, Node> nodes_;
  int next_id_ = 0;
};

}  // namespace polyhe
