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
#include <string>
#include <vector>

#include "json.hpp"
#include "polyhe/levels/modulus_chain.hpp"
#include "polyhe/sim/layout.hpp"

namespace polyhe {

enum class OpCode {
  kEncode,     // input channel `amount` -> dst
  kRotate,     // dst[i] = a[(i + step) mod n]
  kMultPlain,  // dst = a * plaintext
  kMultCt,     // dst = a * b
  kAdd,        // dst = a + b
  kAddPlain,   // dst = a + plaintext
  kScaleUp,    // dst = a * Delta^amount, exact integer scalar
  kModSwitch,  // drops `amount` moduli without dividing
  kRescale,    // dst = round(a / q_level)
  kDecode,     // output `amount` <- a
};

const char* to_string(OpCode op);
OpCode opcode_from_string(const std::string& name);

/// One instruction with the sublevel and level its result must carry.
struct Instruction {
  OpCode op = OpCode::kAdd;
  int dst = -1;
  int a = -1;
  int b = -1;
  int plaintext = -1;
  long step = 0;
  int amount = 0;
  int node = -1;  // graph node being lowered
  int lambda = 0;
  int level = 0;
};

/// Plaintext holding one value per region on the valid slots of `mask`
/// (a layout index), zero elsewhere, encoded at scale Delta^lambda.
struct Plaintext {
  int mask = 0;
  int lambda = 1;
  std::vector<double> values;  // one per region
};

/// Convolution slice: kernel column `column` of convolution `node`.
struct SliceTag {
  int node = -1;
  std::size_t column = 0;
  bool operator<(const SliceTag& o) const {
    return node != o.node ? node < o.node : column < o.column;
  }
};

/// Rescales emitted per channel while lowering a node, and the sublevel and
/// level of its outputs.
struct NodeSchedule {
  int rescales = 0;
  int lambda = 0;
  int level = 0;
  bool operator==(const NodeSchedule&) const = default;
};

struct CircuitProgram {
  ModulusChainPlan chain;
  std::size_t regions = 1;
  std::vector<SlotLayout> layouts;
  int input_layout = 0;
  std::size_t input_channels = 0;
  int input_lambda = 1;
  std::vector<Instruction> instructions;
  std::vector<Plaintext> plaintexts;
  std::size_t registers = 0;
  int output_layout = 0;
  std::size_t outputs = 0;
  /// Distinct weight plaintexts used per convolution slice.
  std::map<SliceTag, std::size_t> slice_encodings;
  std::map<int, NodeSchedule> schedule;
  /// Levels consumed by the deepest output before it was moved to q0.
  int levels_used = 0;

  std::size_t slots() const { return layouts.at(input_layout).slots; }
  double delta() const;
  std::size_t count(OpCode op) const;
  /// Structural checks: register use before definition, plaintext and
  /// layout indices, decode coverage. Throws ScheduleError.
  void validate() const;
};

nlohmann::json to_json(const CircuitProgram& p);
CircuitProgram program_from_json(const nlohmann::json& j);

}  // namespace polyhe
