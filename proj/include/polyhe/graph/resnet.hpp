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

#include <cstdint>
#include <string>
#include <vector>

#include "polyhe/graph/graph.hpp"

namespace polyhe {

enum class ResNetVariant { kRN18, kRN20, kRN32 };

ResNetVariant resnet_variant_from_string(const std::string& name);
const char* to_string(ResNetVariant v);

struct ResNetOptions {
  ResNetVariant variant = ResNetVariant::kRN20;
  int act_degree = 2;                // 2 or 4
  std::vector<double> act_coeffs;    // overrides the fitted ReLU polynomial
  std::size_t width = 16;            // channels of the first stage
  TensorShape input{3, 32, 32};
  std::size_t classes = 10;
  std::uint64_t seed = 0;
  /// Sets batch-norm statistics from a random calibration batch so that
  /// pre-activations stay near the approximation interval.
  bool calibrate = true;
  std::size_t calibration_samples = 16;
};

/// Random-weight ResNet built from basic blocks
/// conv-bn-act-conv-bn-(+shortcut)-act. Projection shortcuts (1x1 conv + bn)
/// sit on parallel branches so the longest path holds 17/19/31 conv, bn and
/// activation nodes plus one pool and one linear layer.
ModelGraph build_resnet_graph(const ResNetOptions& opts);

/// Polynomial ReLU approximation used by the generator (c = 2, b = 10).
std::vector<double> default_activation(int degree);

}  // namespace polyhe
