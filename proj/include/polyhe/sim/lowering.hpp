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

#include <vector>

#include "polyhe/graph/graph.hpp"
#include "polyhe/levels/modulus_chain.hpp"
#include "polyhe/sim/program.hpp"

namespace polyhe {

struct CompileOptions {
  int log2_delta = 40;
  int sublevels = 2;      // l, rescale moduli q_i ~ Delta^l
  std::size_t slots = 0;  // N / 2; 0 picks the smallest power of two that fits
};

/// Zero rows and columns kept around the input grid so that every
/// convolution tap of every layer reads zeros outside the image.
std::size_t required_margin(const ModelGraph& g);

/// Sublevel of the encoded input: l when every consumer of the input is a
/// convolution or linear layer, 1 otherwise.
int input_sublevel(const ModelGraph& g, int sublevels);

/// Lowers one model, or M shape-identical models packed into M slot regions,
/// against `chain`. Weights are encoded at sublevel 1. A ciphertext whose
/// sublevel exceeds the capacity of the next modulus is rescaled after each
/// node; operands of ciphertext products that hold spare levels are first
/// brought down to sublevel 1. Throws DepthExhaustedError when the chain is
/// too short, LayoutError on unsupported layouts and ValidationError on
/// mismatched ensembles.
CircuitProgram lower_circuit(const std::vector<ModelGraph>& models, const ModulusChainPlan& chain,
                             const CompileOptions& options = {});

}  // namespace polyhe
