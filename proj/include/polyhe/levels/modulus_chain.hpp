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

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace polyhe {

enum class ModulusRole { kOutput, kRescale, kSpecial };

const char* to_string(ModulusRole role);

struct Modulus {
  ModulusRole role = ModulusRole::kRescale;
  int bits = 0;
  int sublevel = 0;  // round(bits / log2 Delta)
  std::string hex;   // carried as metadata only
};

/// Moduli ordered q0 (output), q1..qL (rescale, q1 dropped last), P.
struct ModulusChainPlan {
  std::string name;
  int log2_n = 15;
  int log2_delta = 40;
  int sublevels = 1;  // l, with rescale moduli q_i ~ Delta^l
  std::vector<Modulus> moduli;

  int rescale_count() const;
  /// Sum of every modulus bit size including the special modulus.
  int total_bits() const;
  const Modulus& output_modulus() const;
  /// Rescale moduli in the order they are dropped (q_L first).
  std::vector<Modulus> drop_order() const;
  /// Throws Error when a rescale modulus has sublevel < 1 or roles are out of
  /// order.
  void validate() const;
};

/// Chain with `rescale_count` moduli of l * log2(Delta) bits.
ModulusChainPlan make_chain(int log2_delta, int sublevels, int rescale_count, int log2_n = 15,
                            int output_bits = 0, int special_bits = 0);

/// Loads a preset by name ("rn18", "rn20", "rn32") from the preset directory
/// or from an explicit JSON file path.
ModulusChainPlan load_preset(const std::string& name_or_path);
std::filesystem::path preset_directory();

/// log2 of a hexadecimal literal such as "0x820001".
double hex_log2(const std::string& hex);

nlohmann::json to_json(const ModulusChainPlan& plan);
ModulusChainPlan chain_from_json(const nlohmann::json& j);

}  // namespace polyhe
