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

#include <string>
#include <vector>

#include "polyhe/graph/graph.hpp"

namespace polyhe {

/// Case 1: P(B(x)) as one activation. Requires a degree-2 activation; the
/// result has one coefficient row per batch-norm channel.
PolyActNode fuse_bn_act(const BatchNormNode& bn, const PolyActNode& act);

/// Case 2: B(C(x)) as one convolution (w' = b1 w, bias' = b1 bias + b0 per
/// output channel).
ConvNode fuse_bn_conv(const ConvNode& conv, const BatchNormNode& bn);

/// Case 3: P(B_X(x) + B_Y(y)) as a polyskip with the six quadratic monomials.
PolySkipNode fuse_skip_bn_bn(const BatchNormNode& bn_x, const BatchNormNode& bn_y,
                             const PolyActNode& act);

/// Case 4: P(B_X(x) + y).
PolySkipNode fuse_skip_identity(const BatchNormNode& bn_x, const PolyActNode& act);

/// General skip fusion P(w_x B_X(x) + w_y B_Y(y)); null batch norms stand for
/// the identity and `add` supplies the branch weights (unit when null).
PolySkipNode fuse_skip(const BatchNormNode* bn_x, const BatchNormNode* bn_y, const PolyActNode& act,
                       const AddNode* add = nullptr);

enum class FusionRule { kConvBn, kSkip, kBnAct };

const char* to_string(FusionRule rule);

struct Rewrite {
  std::string rule;
  std::vector<int> nodes;  // matched node ids, result node first
};

/// Applies the fusing rules until none matches. Each round applies the first
/// rule in `order` that has a match, at its smallest matching node id.
std::vector<Rewrite> fuse_graph(ModelGraph& g,
                                const std::vector<FusionRule>& order = {FusionRule::kConvBn,
                                                                        FusionRule::kSkip,
                                                                        FusionRule::kBnAct});

}  // namespace polyhe
