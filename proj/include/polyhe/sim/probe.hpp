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
#include "polyhe/sim/program.hpp"

namespace polyhe {

struct ProbePoint {
  double deviation = 0.0;   // q_i = Delta^l (1 + deviation)
  double log_ratio = 0.0;   // |log(q_i / Delta^l)|
  int rescales = 0;         // levels consumed by the output
  double max_rel_error = 0.0;
};

/// Chain of `depth` blocks conv1x1 -> monic quadratic on a 1 x 4 x 4 input,
/// then pooling and a linear layer, with positive weights.
ModelGraph probe_graph(int depth, std::uint64_t seed);

/// Runs `prog` (compiled against exact moduli) with every rescale modulus
/// perturbed by `deviation` and compares the decoded outputs with
/// `reference`.
ProbePoint rescale_error_probe(const CircuitProgram& prog, const Tensor& input,
                               const std::vector<double>& reference, double deviation);

/// Probe of probe_graph(depth) at each deviation, with Delta = 2^log2_delta.
std::vector<ProbePoint> rescale_error_sweep(int depth, const std::vector<double>& deviations,
                                            int log2_delta = 40, int sublevels = 2, std::uint64_t seed = 0);

}  // namespace polyhe
