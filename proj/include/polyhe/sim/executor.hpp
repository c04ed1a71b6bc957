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

#include <gmpxx.h>

#include <optional>
#include <vector>

#include "json.hpp"
#include "polyhe/graph/tensor.hpp"
#include "polyhe/levels/sublevel.hpp"
#include "polyhe/sim/program.hpp"

namespace polyhe {

/// Slot vector of scaled integers. `meta.scale` is the nominal scale
/// Delta^lambda the schedule assumes; `log2_true_scale` follows the actual
/// moduli divided out.
struct SimCiphertext {
  std::vector<mpz_class> slots;
  CiphertextMeta meta;
  double log2_true_scale = 0.0;
};

struct SimPlaintext {
  std::vector<mpz_class> values;  // one per region
  int lambda = 1;
};

/// round(v * 2^bits), ties away from zero.
mpz_class encode_scalar(double v, long bits);
/// z / 2^bits.
double decode_scalar(const mpz_class& z, long bits);
/// round(z / q), ties away from zero.
mpz_class divide_round(const mpz_class& z, const mpz_class& q);

/// Input channels of `image` on `layout`, replicated into every region, at
/// scale Delta^lambda.
std::vector<SimCiphertext> encode_input(const Tensor& image, const SlotLayout& layout, int log2_delta,
                                        int lambda, int level);
/// Values on the layout's valid slots, region-major.
std::vector<double> decode(const SimCiphertext& ct, const SlotLayout& layout, int log2_delta);
/// Cyclic left rotation.
SimCiphertext rotate(const SimCiphertext& ct, long step);

struct TraceEntry {
  std::size_t index = 0;
  OpCode op = OpCode::kAdd;
  int node = -1;
  int lambda = 0;
  int level = 0;
  double log2_scale = 0.0;
  double log2_true_scale = 0.0;
};

nlohmann::json to_json(const TraceEntry& t);

struct RunOptions {
  /// Rescale moduli indexed by level (entry 0 unused). Empty means
  /// q_i = Delta^sublevel(q_i) exactly.
  std::vector<mpz_class> moduli;
  bool trace = false;
};

struct RunResult {
  std::vector<std::vector<double>> member_outputs;  // per region
  std::vector<double> averaged;
  std::vector<TraceEntry> trace;
  std::size_t rescales = 0;
  int levels_used = 0;
  /// Distinct plaintexts encoded by the executor's cache.
  std::size_t plaintexts_encoded = 0;
};

/// Executes a program, checking every result's sublevel and level against
/// the schedule (ScheduleError on mismatch).
RunResult run_circuit(const CircuitProgram& prog, const Tensor& image, const RunOptions& options = {});

/// Moduli q_i = round(Delta^l (1 + deviation)) for every level of the chain.
std::vector<mpz_class> perturbed_moduli(const ModulusChainPlan& chain, double deviation);
/// The chain's own hexadecimal moduli, when every rescale modulus carries one.
std::optional<std::vector<mpz_class>> chain_moduli(const ModulusChainPlan& chain);

}  // namespace polyhe
