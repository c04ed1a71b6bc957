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
#include <vector>

#include "polyhe/graph/graph.hpp"

namespace polyhe {

struct EquivalenceReport {
  std::size_t samples = 0;
  double max_rel_error = 0.0;  // max over samples of |a - b|_inf / |a|_inf
  double max_abs_error = 0.0;
  std::size_t argmax_mismatches = 0;
  bool within(double tol) const { return max_rel_error <= tol && argmax_mismatches == 0; }
};

/// Relative error |a - b|_inf / |a|_inf (absolute when a is zero).
double relative_error(const std::vector<double>& a, const std::vector<double>& b);

std::size_t argmax(const std::vector<double>& v);

/// Random inputs uniform in [-range, range] for a graph's Input shape.
std::vector<Tensor> random_inputs(const ModelGraph& g, std::size_t count, std::uint64_t seed,
                                  double range = 1.0);

/// Compares reference_eval of two graphs with the same Input shape.
EquivalenceReport check_equivalence(const ModelGraph& a, const ModelGraph& b,
                                    const std::vector<Tensor>& inputs);

}  // namespace polyhe
