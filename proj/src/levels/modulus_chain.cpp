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

#include "polyhe/levels/modulus_chain.hpp"

#include <cmath>
#include <fstream>

#include "polyhe/errors.hpp"

#ifndef POLYHE_PRESET_DIR
#define POLYHE_PRESET_DIR "presets"
#endif

namespace polyhe {

using nlohmann::json;

namespace {

ModulusRole role_from_string(const std::string& s) {
  if (s == "output") return ModulusRole::kOutput;
  if (s == "rescale") return ModulusRole::kRescale;
  if (s == "special") return ModulusRole::kSpecial;
  throw ParseError("unknown modulus role '" + s + "'");
}

Modulus make_modulus(ModulusRole role, int bits, int log2_delta, std::string hex = {}) {
  int lambda = static_cast<int>(std::lround(static_cast<double>(bits) / log2_delta));
  return {role, bits, lambda, std::move(hex)};
}

}  // namespace

const char* to_string(ModulusRole role) {
  switch (role) {
    case ModulusRole::kOutput:
      return "output";
    case ModulusRole::kRescale:
      return "rescale";
    case ModulusRole::kSpecial:
      return "special";
  }
  return "?";
}

int ModulusChainPlan::rescale_count() const {
  int n = 0;
  for (const auto& m : moduli) n += m.role == ModulusRole::kRescale;
  return n;
}

int ModulusChainPlan::total_bits() const {
  int total = 0;
  for (const auto& m : moduli) total += m.bits;
  return total;
}

const Modulus& ModulusChainPlan::output_modulus() const {
  for (const auto& m : moduli) {
    if (m.role == ModulusRole::kOutput) return m;
  }
  throw Error("modulus chain has no output modulus");
}

std::vector<Modulus> ModulusChainPlan::drop_order() const {
  std::vector<Modulus> out;
  for (auto it = moduli.rbegin(); it != moduli.rend(); ++it) {
    if (it->role == ModulusRole::kRescale) out.push_back(*it);
  }
  return out;
}

void ModulusChainPlan::validate() const {
  if (log2_delta < 1) throw Error("chain: log2(Delta) must be >= 1");
  int outputs = 0;
  ModulusRole prev = ModulusRole::kOutput;
  for (const auto& m : moduli) {
    if (m.bits < 1) throw Error("chain: modulus bit size must be >= 1");
    if (static_cast<int>(m.role) < static_cast<int>(prev)) {
      throw Error("chain: moduli must be ordered q0, q1..qL, P");
    }
    prev = m.role;
    outputs += m.role == ModulusRole::kOutput;
    if (m.role == ModulusRole::kRescale && m.sublevel < 1) {
      throw Error("chain: rescale modulus of " + std::to_string(m.bits) + " bits has sublevel < 1");
    }
  }
  if (outputs != 1) throw Error("chain: exactly one output modulus required");
}

ModulusChainPlan make_chain(int log2_delta, int sublevels, int rescale_count, int log2_n,
                            int output_bits, int special_bits) {
  ModulusChainPlan plan;
  plan.log2_n = log2_n;
  plan.log2_delta = log2_delta;
  plan.sublevels = sublevels;
  plan.moduli.push_back(make_modulus(ModulusRole::kOutput, output_bits > 0 ? output_bits : log2_delta + 1, log2_delta));
  for (int i = 0; i < rescale_count; ++i) {
    plan.moduli.push_back(make_modulus(ModulusRole::kRescale, sublevels * log2_delta, log2_delta));
  }
  if (special_bits > 0) plan.moduli.push_back(make_modulus(ModulusRole::kSpecial, special_bits, log2_delta));
  plan.validate();
  return plan;
}

double hex_log2(const std::string& hex) {
  std::size_t i = hex.rfind("0x", 0) == 0 || hex.rfind("0X", 0) == 0 ? 2 : 0;
  long double value = 0;
  for (; i < hex.size(); ++i) {
    int d = std::stoi(hex.substr(i, 1), nullptr, 16);
    value = value * 16 + d;
  }
  return static_cast<double>(std::log2(value));
}

json to_json(const ModulusChainPlan& plan) {
  json moduli = json::array();
  for (const auto& m : plan.moduli) {
    json jm = {{"role", to_string(m.role)}, {"bits", m.bits}, {"sublevel", m.sublevel}};
    if (!m.hex.empty()) jm["hex"] = m.hex;
    moduli.push_back(jm);
  }
  return {{"name", plan.name},
          {"log2_n", plan.log2_n},
          {"log2_delta", plan.log2_delta},
          {"sublevels", plan.sublevels},
          {"rescale_count", plan.rescale_count()},
          {"log2_q", plan.total_bits()},
          {"moduli", moduli}};
}

ModulusChainPlan chain_from_json(const json& j) {
  try {
    ModulusChainPlan plan;
    plan.name = j.value("name", std::string{});
    plan.log2_n = j.at("log2_n").get<int>();
    plan.log2_delta = j.at("log2_delta").get<int>();
    plan.sublevels = j.value("sublevels", 1);
    if (j.contains("moduli")) {
      for (const auto& jm : j.at("moduli")) {
        plan.moduli.push_back(make_modulus(role_from_string(jm.at("role").get<std::string>()),
                                           jm.at("bits").get<int>(), plan.log2_delta,
                                           jm.value("hex", std::string{})));
      }
    } else {
      // Preset form: bit sizes per role plus the published hex list, which
      // lists rescale moduli first, then q0, then P.
      const json& bits = j.at("bits");
      int count = bits.at("rescale_count").get<int>();
      std::vector<std::string> hex = j.value("moduli_hex", std::vector<std::string>{});
      if (!hex.empty() && hex.size() != static_cast<std::size_t>(count) + 2) {
        throw ParseError("preset '" + plan.name + "': hex list length does not match the bit sizes");
      }
      auto hex_at = [&](std::size_t k) { return hex.empty() ? std::string{} : hex[k]; };
      plan.moduli.push_back(make_modulus(ModulusRole::kOutput, bits.at("output").get<int>(),
                                         plan.log2_delta, hex_at(count)));
      for (int i = 0; i < count; ++i) {
        plan.moduli.push_back(make_modulus(ModulusRole::kRescale, bits.at("rescale").get<int>(),
                                           plan.log2_delta, hex_at(i)));
      }
      plan.moduli.push_back(make_modulus(ModulusRole::kSpecial, bits.at("special").get<int>(),
                                         plan.log2_delta, hex_at(count + 1)));
    }
    plan.validate();
    return plan;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed modulus chain: ") + e.what());
  }
}

std::filesystem::path preset_directory() { return POLYHE_PRESET_DIR; }

ModulusChainPlan load_preset(const std::string& name_or_path) {
  std::filesystem::path path = name_or_path;
  if (!std::filesystem::exists(path)) path = preset_directory() / (name_or_path + ".json");
  std::ifstream in(path);
  if (!in) throw Error("unknown preset '" + name_or_path + "' (looked in " + path.string() + ")");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ParseError("preset " + path.string() + ": " + e.what());
  }
  return chain_from_json(j);
}

}  // namespace polyhe
