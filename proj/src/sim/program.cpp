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

#include "polyhe/sim/program.hpp"

#include <cmath>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

constexpr const char* kOpNames[] = {"encode",   "rotate",  "mult_plain", "mult_ct", "add",
                                    "add_plain", "scale_up", "mod_switch", "rescale", "decode"};

[[noreturn]] void bad(std::size_t index, const std::string& what) {
  throw ScheduleError("instruction " + std::to_string(index) + ": " + what);
}

}  // namespace

const char* to_string(OpCode op) { return kOpNames[static_cast<int>(op)]; }

OpCode opcode_from_string(const std::string& name) {
  for (int i = 0; i < 10; ++i) {
    if (name == kOpNames[i]) return static_cast<OpCode>(i);
  }
  throw ParseError("unknown instruction '" + name + "'");
}

double CircuitProgram::delta() const { return std::ldexp(1.0, chain.log2_delta); }

std::size_t CircuitProgram::count(OpCode op) const {
  std::size_t n = 0;
  for (const auto& in : instructions) n += in.op == op;
  return n;
}

void CircuitProgram::validate() const {
  std::vector<bool> defined(registers, false);
  std::vector<bool> decoded(outputs, false);
  auto use = [&](std::size_t i, int r) {
    if (r < 0 || static_cast<std::size_t>(r) >= registers || !defined[r]) {
      bad(i, "reads undefined register " + std::to_string(r));
    }
  };
  for (std::size_t i = 0; i < instructions.size(); ++i) {
    const auto& in = instructions[i];
    switch (in.op) {
      case OpCode::kEncode:
        if (in.amount < 0 || static_cast<std::size_t>(in.amount) >= input_channels) bad(i, "bad input channel");
        break;
      case OpCode::kMultCt:
      case OpCode::kAdd:
        use(i, in.a);
        use(i, in.b);
        break;
      case OpCode::kMultPlain:
      case OpCode::kAddPlain:
        use(i, in.a);
        if (in.plaintext < 0 || static_cast<std::size_t>(in.plaintext) >= plaintexts.size()) {
          bad(i, "bad plaintext index");
        }
        break;
      case OpCode::kDecode:
        use(i, in.a);
        if (in.amount < 0 || static_cast<std::size_t>(in.amount) >= outputs) bad(i, "bad output index");
        decoded[in.amount] = true;
        continue;
      default:
        use(i, in.a);
        break;
    }
    if (in.dst < 0 || static_cast<std::size_t>(in.dst) >= registers || defined[in.dst]) {
      bad(i, "writes register " + std::to_string(in.dst) + " twice or out of range");
    }
    if (in.lambda < 1 || in.level < 0) bad(i, "result has sublevel < 1 or negative level");
    defined[in.dst] = true;
  }
  for (const auto& p : plaintexts) {
    if (p.mask < 0 || static_cast<std::size_t>(p.mask) >= layouts.size()) {
      throw ScheduleError("plaintext mask out of range");
    }
    if (p.values.size() != regions || p.lambda < 1) throw ScheduleError("malformed plaintext");
  }
  for (std::size_t o = 0; o < outputs; ++o) {
    if (!decoded[o]) throw ScheduleError("output " + std::to_string(o) + " is never decoded");
  }
}

nlohmann::json to_json(const CircuitProgram& p) {
  nlohmann::json layouts = nlohmann::json::array();
  for (const auto& l : p.layouts) layouts.push_back(to_json(l));
  nlohmann::json code = nlohmann::json::array();
  for (const auto& in : p.instructions) {
    code.push_back({to_string(in.op), in.dst, in.a, in.b, in.plaintext, in.step, in.amount, in.node,
                    in.lambda, in.level});
  }
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& pt : p.plaintexts) pts.push_back({pt.mask, pt.lambda, pt.values});
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& [tag, n] : p.slice_encodings) slices.push_back({tag.node, tag.column, n});
  nlohmann::json schedule = nlohmann::json::object();
  for (const auto& [node, n] : p.schedule) {
    schedule[std::to_string(node)] = {{"rescales", n.rescales}, {"lambda", n.lambda}, {"level", n.level}};
  }
  return {{"chain", to_json(p.chain)},
          {"regions", p.regions},
          {"layouts", layouts},
          {"input", {{"layout", p.input_layout}, {"channels", p.input_channels}, {"lambda", p.input_lambda}}},
          {"output", {{"layout", p.output_layout}, {"count", p.outputs}}},
          {"registers", p.registers},
          {"levels_used", p.levels_used},
          {"schedule", schedule},
          {"slice_encodings", slices},
          {"plaintexts", pts},
          {"instructions", code}};
}

CircuitProgram program_from_json(const nlohmann::json& j) {
  try {
    CircuitProgram p;
    p.chain = chain_from_json(j.at("chain"));
    p.regions = j.at("regions");
    for (const auto& l : j.at("layouts")) p.layouts.push_back(layout_from_json(l));
    p.input_layout = j.at("input").at("layout");
    p.input_channels = j.at("input").at("channels");
    p.input_lambda = j.at("input").at("lambda");
    p.output_layout = j.at("output").at("layout");
    p.outputs = j.at("output").at("count");
    p.registers = j.at("registers");
    p.levels_used = j.at("levels_used");
    for (const auto& [k, v] : j.at("schedule").items()) {
      p.schedule[std::stoi(k)] = {v.at("rescales"), v.at("lambda"), v.at("level")};
    }
    for (const auto& s : j.at("slice_encodings")) {
      p.slice_encodings[{s.at(0).get<int>(), s.at(1).get<std::size_t>()}] = s.at(2);
    }
    for (const auto& pt : j.at("plaintexts")) {
      p.plaintexts.push_back({pt.at(0), pt.at(1), pt.at(2).get<std::vector<double>>()});
    }
    for (const auto& c : j.at("instructions")) {
      Instruction in;
      in.op = opcode_from_string(c.at(0));
      in.dst = c.at(1);
      in.a = c.at(2);
      in.b = c.at(3);
      in.plaintext = c.at(4);
      in.step = c.at(5);
      in.amount = c.at(6);
      in.node = c.at(7);
      in.lambda = c.at(8);
      in.level = c.at(9);
      p.instructions.push_back(in);
    }
    p.validate();
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed circuit program: ") + e.what());
  }
}

}  // namespace polyhe
