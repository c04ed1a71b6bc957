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

#include "polyhe/sim/executor.hpp"

#include <cmath>
#include <map>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

mpz_class pow2(long bits) {
  mpz_class z;
  mpz_ui_pow_ui(z.get_mpz_t(), 2, static_cast<unsigned long>(bits));
  return z;
}

}  // namespace

mpz_class encode_scalar(double v, long bits) {
  if (!std::isfinite(v)) throw Error("cannot encode a non-finite value");
  mpz_class z;
  mpz_set_d(z.get_mpz_t(), std::round(std::ldexp(v, static_cast<int>(bits))));
  return z;
}

double decode_scalar(const mpz_class& z, long bits) {
  long exp = 0;
  const double m = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::ldexp(m, static_cast<int>(exp - bits));
}

mpz_class divide_round(const mpz_class& z, const mpz_class& q) {
  mpz_class twice = 2 * z;
  mpz_class out;
  if (z >= 0) {
    twice += q;
  } else {
    twice -= q;
  }
  mpz_class den = 2 * q;
  mpz_tdiv_q(out.get_mpz_t(), twice.get_mpz_t(), den.get_mpz_t());
  return out;
}

std::vector<SimCiphertext> encode_input(const Tensor& image, const SlotLayout& layout, int log2_delta,
                                        int lambda, int level) {
  if (image.shape.height != layout.height || image.shape.width != layout.width) {
    throw ShapeError("input " + image.shape.str() + " does not match the layout");
  }
  std::vector<SimCiphertext> out;
  const long bits = static_cast<long>(lambda) * log2_delta;
  const double delta = std::ldexp(1.0, log2_delta);
  for (std::size_t c = 0; c < image.shape.channels; ++c) {
    SimCiphertext ct;
    ct.slots.assign(layout.slots, 0);
    for (std::size_t r = 0; r < layout.regions; ++r)
      for (std::size_t i = 0; i < layout.height; ++i)
        for (std::size_t j = 0; j < layout.width; ++j) {
          ct.slots[layout.slot(r, i, j)] =
              encode_scalar(image.data[(c * layout.height + i) * layout.width + j], bits);
        }
    ct.meta = CiphertextMeta::make(std::pow(delta, lambda), delta, level);
    ct.log2_true_scale = static_cast<double>(bits);
    out.push_back(std::move(ct));
  }
  return out;
}

std::vector<double> decode(const SimCiphertext& ct, const SlotLayout& layout, int log2_delta) {
  const long bits = static_cast<long>(ct.meta.sublevel) * log2_delta;
  std::vector<double> out;
  for (std::size_t s : layout.valid_slots()) out.push_back(decode_scalar(ct.slots.at(s), bits));
  return out;
}

SimCiphertext rotate(const SimCiphertext& ct, long step) {
  SimCiphertext out;
  out.meta = ct.meta;
  out.log2_true_scale = ct.log2_true_scale;
  const long n = static_cast<long>(ct.slots.size());
  out.slots.resize(ct.slots.size());
  const long shift = ((step % n) + n) % n;
  for (long i = 0; i < n; ++i) out.slots[i] = ct.slots[(i + shift) % n];
  return out;
}

nlohmann::json to_json(const TraceEntry& t) {
  return {{"index", t.index}, {"op", to_string(t.op)},          {"node", t.node},
          {"lambda", t.lambda}, {"level", t.level},          {"log2_scale", t.log2_scale},
          {"log2_true_scale", t.log2_true_scale}};
}

std::vector<mpz_class> perturbed_moduli(const ModulusChainPlan& chain, double deviation) {
  std::vector<mpz_class> q{0};
  for (std::size_t i = 1; i < chain.moduli.size(); ++i) {
    const auto& m = chain.moduli[i];
    if (m.role != ModulusRole::kRescale) continue;
    mpf_class f(0, 4096);
    mpf_class base(0, 4096);
    mpf_set_z(base.get_mpf_t(), pow2(static_cast<long>(m.sublevel) * chain.log2_delta).get_mpz_t());
    f = base * mpf_class(1.0 + deviation, 4096);
    mpz_class z(f + 0.5);
    q.push_back(z);
  }
  return q;
}

std::optional<std::vector<mpz_class>> chain_moduli(const ModulusChainPlan& chain) {
  std::vector<mpz_class> q{0};
  for (std::size_t i = 1; i < chain.moduli.size(); ++i) {
    const auto& m = chain.moduli[i];
    if (m.role != ModulusRole::kRescale) continue;
    if (m.hex.empty()) return std::nullopt;
    q.emplace_back(m.hex.substr(2), 16);
  }
  return q;
}

RunResult run_circuit(const CircuitProgram& prog, const Tensor& image, const RunOptions& options) {
  const int log2d = prog.chain.log2_delta;
  const double delta = prog.delta();
  const auto& in_layout = prog.layouts.at(prog.input_layout);
  const std::size_t n = in_layout.slots;
  const int top = prog.chain.rescale_count();
  if (image.shape.channels != prog.input_channels) throw ShapeError("input channel count mismatch");

  std::vector<mpz_class> moduli = options.moduli;
  std::vector<int> caps{0};
  for (std::size_t i = 1; i < prog.chain.moduli.size(); ++i) {
    if (prog.chain.moduli[i].role == ModulusRole::kRescale) caps.push_back(prog.chain.moduli[i].sublevel);
  }
  if (moduli.empty()) {
    moduli.push_back(0);
    for (std::size_t l = 1; l < caps.size(); ++l) moduli.push_back(pow2(static_cast<long>(caps[l]) * log2d));
  }
  if (moduli.size() != caps.size()) throw ScheduleError("modulus list does not match the chain");

  // Last use of every register, to free slot vectors early.
  std::vector<std::size_t> last_use(prog.registers, 0);
  for (std::size_t i = 0; i < prog.instructions.size(); ++i) {
    const auto& in = prog.instructions[i];
    if (in.a >= 0) last_use[in.a] = i;
    if (in.b >= 0) last_use[in.b] = i;
  }

  const auto inputs = encode_input(image, in_layout, log2d, prog.input_lambda, top);
  std::vector<SimCiphertext> regs(prog.registers);
  std::map<int, SimPlaintext> cache;
  std::vector<std::vector<std::size_t>> masks(prog.layouts.size());
  for (std::size_t l = 0; l < prog.layouts.size(); ++l) masks[l] = prog.layouts[l].valid_slots();

  auto encoded = [&](int id) -> const SimPlaintext& {
    auto it = cache.find(id);
    if (it != cache.end()) return it->second;
    const auto& p = prog.plaintexts.at(id);
    SimPlaintext sp;
    sp.lambda = p.lambda;
    for (double v : p.values) sp.values.push_back(encode_scalar(v, static_cast<long>(p.lambda) * log2d));
    return cache.emplace(id, std::move(sp)).first->second;
  };
  auto set_meta = [&](SimCiphertext& ct, int lambda, int level) {
    ct.meta = CiphertextMeta::make(std::pow(delta, lambda), delta, level);
  };

  RunResult result;
  result.member_outputs.assign(prog.regions, std::vector<double>(prog.outputs * masks[prog.output_layout].size() / prog.regions));
  const std::size_t per_region = masks[prog.output_layout].size() / prog.regions;

  for (std::size_t i = 0; i < prog.instructions.size(); ++i) {
    const auto& in = prog.instructions[i];
    SimCiphertext out;
    const SimCiphertext* a = in.a >= 0 ? &regs.at(in.a) : nullptr;
    const SimCiphertext* b = in.b >= 0 ? &regs.at(in.b) : nullptr;
    switch (in.op) {
      case OpCode::kEncode:
        out = inputs.at(in.amount);
        break;
      case OpCode::kRotate:
        out = rotate(*a, in.step);
        break;
      case OpCode::kMultPlain: {
        const auto& pt = encoded(in.plaintext);
        const auto& mask = masks[prog.plaintexts[in.plaintext].mask];
        const auto& layout = prog.layouts[prog.plaintexts[in.plaintext].mask];
        out.slots.assign(n, 0);
        for (std::size_t s : mask) out.slots[s] = a->slots[s] * pt.values[layout.region_of(s)];
        set_meta(out, a->meta.sublevel + pt.lambda, a->meta.level);
        out.log2_true_scale = a->log2_true_scale + static_cast<double>(pt.lambda) * log2d;
        break;
      }
      case OpCode::kAddPlain: {
        const auto& pt = encoded(in.plaintext);
        if (pt.lambda != a->meta.sublevel) throw ScheduleError("add_plain at mismatched sublevel");
        const auto& layout = prog.layouts[prog.plaintexts[in.plaintext].mask];
        out = *a;
        for (std::size_t s : masks[prog.plaintexts[in.plaintext].mask]) out.slots[s] += pt.values[layout.region_of(s)];
        break;
      }
      case OpCode::kMultCt: {
        if (a->meta.level != b->meta.level) throw ScheduleError("mult_ct operands at different levels");
        out.slots.resize(n);
        for (std::size_t s = 0; s < n; ++s) out.slots[s] = a->slots[s] * b->slots[s];
        set_meta(out, a->meta.sublevel + b->meta.sublevel, a->meta.level);
        out.log2_true_scale = a->log2_true_scale + b->log2_true_scale;
        break;
      }
      case OpCode::kAdd: {
        if (a->meta.level != b->meta.level || a->meta.sublevel != b->meta.sublevel) {
          throw ScheduleError("add operands at different scale or level");
        }
        out.slots.resize(n);
        for (std::size_t s = 0; s < n; ++s) out.slots[s] = a->slots[s] + b->slots[s];
        out.meta = a->meta;
        out.log2_true_scale = a->log2_true_scale;
        break;
      }
      case OpCode::kScaleUp: {
        const mpz_class f = pow2(static_cast<long>(in.amount) * log2d);
        out.slots.resize(n);
        for (std::size_t s = 0; s < n; ++s) out.slots[s] = a->slots[s] * f;
        set_meta(out, a->meta.sublevel + in.amount, a->meta.level);
        out.log2_true_scale = a->log2_true_scale + static_cast<double>(in.amount) * log2d;
        break;
      }
      case OpCode::kModSwitch:
        if (in.amount > a->meta.level) throw DepthExhaustedError("mod_switch below level 0");
        out = *a;
        out.meta.level -= in.amount;
        break;
      case OpCode::kRescale: {
        const int level = a->meta.level;
        if (level < 1) throw DepthExhaustedError("rescale at level 0");
        const mpz_class& q = moduli.at(level);
        if (!needs_rescale(a->meta, caps.at(level))) throw ScheduleError("rescale not required by the sublevel rule");
        out.slots.resize(n);
        for (std::size_t s = 0; s < n; ++s) out.slots[s] = divide_round(a->slots[s], q);
        // Fixed-scale semantics: the nominal scale drops by Delta^l whatever q is.
        set_meta(out, a->meta.sublevel - caps.at(level), level - 1);
        out.log2_true_scale = a->log2_true_scale - std::log2(q.get_d());
        ++result.rescales;
        break;
      }
      case OpCode::kDecode: {
        const auto values = decode(*a, prog.layouts[prog.output_layout], log2d);
        for (std::size_t r = 0; r < prog.regions; ++r)
          for (std::size_t k = 0; k < per_region; ++k) {
            result.member_outputs[r][static_cast<std::size_t>(in.amount) * per_region + k] = values[r * per_region + k];
          }
        break;
      }
    }
    if (in.op != OpCode::kDecode) {
      if (out.meta.sublevel != in.lambda || out.meta.level != in.level) {
        throw ScheduleError("instruction " + std::to_string(i) + " (" + to_string(in.op) + ") produced sublevel " +
                            std::to_string(out.meta.sublevel) + " level " + std::to_string(out.meta.level) +
                            ", schedule says " + std::to_string(in.lambda) + "/" + std::to_string(in.level));
      }
      if (options.trace) {
        result.trace.push_back({i, in.op, in.node, in.lambda, in.level, std::log2(out.meta.scale), out.log2_true_scale});
      }
      regs[in.dst] = std::move(out);
    } else if (options.trace) {
      result.trace.push_back({i, in.op, in.node, a->meta.sublevel, a->meta.level, std::log2(a->meta.scale),
                              a->log2_true_scale});
    }
    if (in.a >= 0 && last_use[in.a] == i) regs[in.a] = SimCiphertext{};
    if (in.b >= 0 && last_use[in.b] == i) regs[in.b] = SimCiphertext{};
  }
  result.levels_used = prog.levels_used;
  result.plaintexts_encoded = cache.size();
  result.averaged.assign(result.member_outputs[0].size(), 0.0);
  for (const auto& m : result.member_outputs)
    for (std::size_t k = 0; k < m.size(); ++k) result.averaged[k] += m[k] / static_cast<double>(prog.regions);
  return result;
}

}  // namespace polyhe
