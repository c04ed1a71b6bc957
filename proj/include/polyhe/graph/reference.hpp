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
#include <vector>

#include "polyhe/graph/graph.hpp"

namespace polyhe {

/// Output of a single node given its evaluated producers (in input order).
Tensor evaluate_node(const Node& node, const std::vector<const Tensor*>& inputs);

/// Plaintext forward pass; activations are evaluated as exact real
/// polynomials. Returns the flattened Output tensor. Throws ShapeError when
/// the input does not match the Input node.
std::vector<double> reference_eval(const ModelGraph& g, const Tensor& input);

/// Same pass, keeping every intermediate tensor keyed by node id.
std::map<int, Tensor> reference_eval_all(const ModelGraph& g, const Tensor& input);

}  // namespace polyhe
