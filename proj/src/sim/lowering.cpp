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

#include "polyhe/sim/lowering.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <set>
#include <tuple>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

struct Ct {
  int reg = -1;
  int lambda = 0;
  int level = 0;
};

struct Value {
  std::vector<Ct> channels;
  int layout = 0;
  bool clean = true;  // gap slots hold zero
};

bool all_equal(const std::vector<double>& v, double x) {
  return std::all_of(v.begin(), v.end(), [&](double y) { return y == x; });
}

class Lowerer {
 public:
  Lowerer(const std::vector<ModelGraph>& models, const ModulusChainPlan& chain, const CompileOptions& opts)
      : models_(models), opts_(opts) {
    prog_.chain = chain;
    prog_.regions = models.size();
    caps_.push_back(std::max(1, chain.output_modulus().sublevel));
    for (std::size_t i = 1; i < chain.moduli.size(); ++i) {
      if (chain.moduli[i].role == ModulusRole::kRescale) caps_.push_back(chain.moduli[i].sublevel);
    }
  }

  CircuitProgram run() {
    const ModelGraph& g = models_[0];
    g.validate();
    shapes_ = g.infer_shapes();
    const auto in_shape = g.node(g.input_id()).as<InputNode>().shape;
    const SlotLayout in_layout = make_input_layout(in_shape.height, in_shape.width, required_margin(g),
                                                   models_.size(), opts_.slots);
    prog_.input_layout = layout_id(in_layout);
    prog_.input_channels = in_shape.channels;
    prog_.input_lambda = input_sublevel(g, opts_.sublevels);

    const int top = static_cast<int>(caps_.size()) - 1;
    for (int id : g.topological_order()) {
      current_node_ = id;
      rescales_ = 0;
      const Node& n = g.node(id);
      Value out;
      switch (n.kind()) {
        case NodeKind::kInput: {
          out.layout = prog_.input_layout;
          for (std::size_t c = 0; c < in_shape.channels; ++c) {
            Instruction in;
            in.op = OpCode::kEncode;
            in.amount = static_cast<int>(c);
            out.channels.push_back(emit(in, prog_.input_lambda, top));
          }
          break;
        }
        case NodeKind::kConv: out = lower_conv(id, values_.at(n.inputs[0])); break;
        case NodeKind::kLinear: out = lower_linear(id, values_.at(n.inputs[0])); break;
        case NodeKind::kBatchNorm: out = lower_batchnorm(id, values_.at(n.inputs[0])); break;
        case NodeKind::kPolyAct: out = lower_polyact(id, values_.at(n.inputs[0])); break;
        case NodeKind::kPolySkip:
          out = lower_polyskip(id, values_.at(n.inputs[0]), values_.at(n.inputs[1]));
          break;
        case NodeKind::kAvgPool: out = lower_pool(id, values_.at(n.inputs[0])); break;
        case NodeKind::kAdd: out = lower_add(id, values_.at(n.inputs[0]), values_.at(n.inputs[1])); break;
        case NodeKind::kOutput: out = lower_output(values_.at(n.inputs[0])); break;
      }
      const std::size_t ch = std::max<std::size_t>(1, out.channels.size());
      prog_.schedule[id] = {static_cast<int>(rescales_ / static_cast<int>(ch)),
                            out.channels.empty() ? 0 : out.channels[0].lambda,
                            out.channels.empty() ? 0 : out.channels[0].level};
      values_[id] = std::move(out);
    }
    for (const auto& [tag, ids] : slice_pts_) prog_.slice_encodings[tag] = ids.size();
    prog_.registers = static_cast<std::size_t>(next_reg_);
    prog_.validate();
    return std::move(prog_);
  }

 private:
  // ---- emission -----------------------------------------------------------

  Ct emit(Instruction in, int lambda, int level) {
    in.dst = next_reg_++;
    in.node = current_node_;
    in.lambda = lambda;
    in.level = level;
    prog_.instructions.push_back(in);
    return {in.dst, lambda, level};
  }

  Ct rotate(const Ct& a, long step) {
    if (step == 0) return a;
    Instruction in;
    in.op = OpCode::kRotate;
    in.a = a.reg;
    in.step = step;
    return emit(in, a.lambda, a.level);
  }

  Ct mult_plain(const Ct& a, int pt) {
    Instruction in;
    in.op = OpCode::kMultPlain;
    in.a = a.reg;
    in.plaintext = pt;
    return emit(in, a.lambda + prog_.plaintexts[pt].lambda, a.level);
  }

  Ct add_plain(const Ct& a, int pt) {
    if (prog_.plaintexts[pt].lambda != a.lambda) throw ScheduleError("add_plain sublevel mismatch");
    Instruction in;
    in.op = OpCode::kAddPlain;
    in.a = a.reg;
    in.plaintext = pt;
    return emit(in, a.lambda, a.level);
  }

  Ct mod_switch(const Ct& a, int level) {
    if (level >= a.level) return a;
    Instruction in;
    in.op = OpCode::kModSwitch;
    in.a = a.reg;
    in.amount = a.level - level;
    return emit(in, a.lambda, level);
  }

  Ct scale_up(const Ct& a, int lambda) {
    if (lambda <= a.lambda) return a;
    Instruction in;
    in.op = OpCode::kScaleUp;
    in.a = a.reg;
    in.amount = lambda - a.lambda;
    return emit(in, lambda, a.level);
  }

  Ct rescale(const Ct& a) {
    if (a.level < 1) {
      throw DepthExhaustedError("node " + std::to_string(current_node_) +
                                " needs a rescale but no modulus is left");
    }
    const int cap = caps_.at(static_cast<std::size_t>(a.level));
    if (a.lambda - cap < 1) throw ScheduleError("rescale would leave sublevel < 1");
    Instruction in;
    in.op = OpCode::kRescale;
    in.a = a.reg;
    ++rescales_;
    return emit(in, a.lambda - cap, a.level - 1);
  }

  /// Rescales while the sublevel exceeds the next modulus' capacity.
  Ct normalize(Ct a) {
    while (a.lambda > cap(a.level)) a = rescale(a);
    return a;
  }

  /// Spends levels above `floor` to bring the sublevel down to 1.
  Ct settle(Ct a, int floor) {
    while (a.lambda > 1 && a.level > floor) {
      const int c = cap(a.level);
      if (a.lambda <= c) a = scale_up(a, c + 1);
      a = rescale(a);
    }
    return a;
  }

  int cap(int level) const {
    return caps_.at(static_cast<std::size_t>(level));
  }

  Ct mult_ct(Ct a, Ct b) {
    const int level = std::min(a.level, b.level);
    a = mod_switch(a, level);
    b = mod_switch(b, level);
    Instruction in;
    in.op = OpCode::kMultCt;
    in.a = a.reg;
    in.b = b.reg;
    return emit(in, a.lambda + b.lambda, level);
  }

  Ct add(Ct a, Ct b) {
    const int level = std::min(a.level, b.level);
    const int lambda = std::max(a.lambda, b.lambda);
    a = scale_up(mod_switch(a, level), lambda);
    b = scale_up(mod_switch(b, level), lambda);
    Instruction in;
    in.op = OpCode::kAdd;
    in.a = a.reg;
    in.b = b.reg;
    return emit(in, lambda, level);
  }

  // ---- plaintexts and layouts ----------------------------------------------

  int layout_id(const SlotLayout& l) {
    for (std::size_t i = 0; i < prog_.layouts.size(); ++i) {
      if (prog_.layouts[i].same_placement(l) && prog_.layouts[i].slots == l.slots) return static_cast<int>(i);
    }
    prog_.layouts.push_back(l);
    return static_cast<int>(prog_.layouts.size()) - 1;
  }

  int plaintext(int mask, std::vector<double> values, int lambda) {
    std::vector<std::uint64_t> bits(values.size());
    std::memcpy(bits.data(), values.data(), values.size() * sizeof(double));
    auto key = std::make_tuple(mask, lambda, bits);
    auto it = pt_cache_.find(key);
    if (it != pt_cache_.end()) return it->second;
    prog_.plaintexts.push_back({mask, lambda, std::move(values)});
    const int id = static_cast<int>(prog_.plaintexts.size()) - 1;
    pt_cache_.emplace(std::move(key), id);
    return id;
  }

  template <typename F>
  std::vector<double> per_model(F&& f) const {
    std::vector<double> v;
    v.reserve(models_.size());
    for (const auto& m : models_) v.push_back(f(m));
    return v;
  }

  const SlotLayout& layout(const Value& v) const { return prog_.layouts.at(v.layout); }

  // ---- nodes ----------------------------------------------------------------

  Value lower_conv(int id, const Value& x) {
    if (!x.clean) throw LayoutError("convolution " + std::to_string(id) + " reads a layout with dirty gaps");
    const SlotLayout in = layout(x);
    const auto& proto = models_[0].node(id).as<ConvNode>();
    const auto& shape = shapes_.at(id);
    const SlotLayout out = in.after_conv(shape.height, shape.width, proto.stride);
    Value y;
    y.layout = layout_id(out);
    const long pad = static_cast<long>(proto.padding);

    // Rotated inputs, one per (input channel, tap).
    std::vector<std::vector<Ct>> taps(proto.in_channels);
    for (std::size_t i = 0; i < proto.in_channels; ++i) {
      for (std::size_t h = 0; h < proto.kernel_h; ++h) {
        for (std::size_t w = 0; w < proto.kernel_w; ++w) {
          const long dr = static_cast<long>(h) - pad, dc = static_cast<long>(w) - pad;
          check_tap(in, out, proto.stride, dr, dc);
          const long step = static_cast<long>(in.step) * (dr * static_cast<long>(in.grid_w) + dc);
          taps[i].push_back(rotate(x.channels[i], step));
        }
      }
    }
    for (std::size_t o = 0; o < proto.out_channels; ++o) {
      bool have = false;
      Ct acc;
      for (std::size_t i = 0; i < proto.in_channels; ++i) {
        for (std::size_t h = 0; h < proto.kernel_h; ++h) {
          for (std::size_t w = 0; w < proto.kernel_w; ++w) {
            auto v = per_model([&](const ModelGraph& m) { return m.node(id).as<ConvNode>().weight(o, i, h, w); });
            if (all_equal(v, 0.0)) continue;
            const int pt = plaintext(y.layout, std::move(v), 1);
            slice_pts_[{id, w}].insert(pt);
            Ct term = mult_plain(taps[i][h * proto.kernel_w + w], pt);
            acc = have ? add(acc, term) : term;
            have = true;
          }
        }
      }
      if (!have) acc = mult_plain(x.channels[0], plaintext(y.layout, std::vector<double>(models_.size(), 0.0), 1));
      auto b = per_model([&](const ModelGraph& m) { return m.node(id).as<ConvNode>().bias[o]; });
      if (!all_equal(b, 0.0)) acc = add_plain(acc, plaintext(y.layout, std::move(b), acc.lambda));
      y.channels.push_back(normalize(acc));
    }
    return y;
  }

  void check_tap(const SlotLayout& in, const SlotLayout& out, std::size_t stride, long dr, long dc) const {
    // Corner outputs bound every read; each must stay inside the region grid.
    for (long i : {0L, static_cast<long>(out.height) - 1}) {
      for (long j : {0L, static_cast<long>(out.width) - 1}) {
        const long r = static_cast<long>(in.origin_row) +
                       static_cast<long>(in.step) * (static_cast<long>(stride) * i + dr);
        const long c = static_cast<long>(in.origin_col) +
                       static_cast<long>(in.step) * (static_cast<long>(stride) * j + dc);
        if (r < 0 || c < 0 || r >= static_cast<long>(in.grid_h) || c >= static_cast<long>(in.grid_w)) {
          throw LayoutError("convolution tap reads outside the slot region (margin too small)");
        }
      }
    }
  }

  Value lower_linear(int id, const Value& x) {
    const auto& proto = models_[0].node(id).as<LinearNode>();
    const SlotLayout in = layout(x);
    if (in.height != 1 || in.width != 1 || x.channels.size() != proto.in_features) {
      throw LayoutError("linear layer " + std::to_string(id) + " expects one pooled value per channel");
    }
    Value y;
    y.layout = x.layout;
    for (std::size_t o = 0; o < proto.out_features; ++o) {
      bool have = false;
      Ct acc;
      for (std::size_t i = 0; i < proto.in_features; ++i) {
        auto v = per_model([&](const ModelGraph& m) { return m.node(id).as<LinearNode>().weight(o, i); });
        if (all_equal(v, 0.0)) continue;
        Ct term = mult_plain(x.channels[i], plaintext(y.layout, std::move(v), 1));
        acc = have ? add(acc, term) : term;
        have = true;
      }
      if (!have) acc = mult_plain(x.channels[0], plaintext(y.layout, std::vector<double>(models_.size(), 0.0), 1));
      auto b = per_model([&](const ModelGraph& m) { return m.node(id).as<LinearNode>().bias[o]; });
      if (!all_equal(b, 0.0)) acc = add_plain(acc, plaintext(y.layout, std::move(b), acc.lambda));
      y.channels.push_back(normalize(acc));
    }
    return y;
  }

  Value lower_batchnorm(int id, const Value& x) {
    Value y;
    y.layout = x.layout;
    y.clean = x.clean;
    for (std::size_t c = 0; c < x.channels.size(); ++c) {
      Ct t = x.channels[c];
      auto slope = per_model([&](const ModelGraph& m) { return m.node(id).as<BatchNormNode>().slope(c); });
      if (!all_equal(slope, 1.0)) t = mult_plain(t, plaintext(y.layout, std::move(slope), 1));
      auto icpt = per_model([&](const ModelGraph& m) { return m.node(id).as<BatchNormNode>().intercept(c); });
      if (!all_equal(icpt, 0.0)) t = add_plain(t, plaintext(y.layout, std::move(icpt), t.lambda));
      y.channels.push_back(normalize(t));
    }
    return y;
  }

  Value lower_pool(int id, const Value& x) {
    const SlotLayout in = layout(x);
    Value y;
    y.layout = layout_id(in.pooled());
    y.clean = false;
    for (std::size_t c = 0; c < x.channels.size(); ++c) {
      Ct acc = x.channels[c];
      for (std::size_t k = 1; k < in.region_size; k *= 2) acc = add(acc, rotate(acc, static_cast<long>(k)));
      auto s = per_model([&](const ModelGraph& m) { return m.node(id).as<AvgPoolNode>().scale; });
      if (!all_equal(s, 1.0)) {
        acc = mult_plain(acc, plaintext(y.layout, std::move(s), 1));
        y.clean = true;
      }
      y.channels.push_back(normalize(acc));
    }
    return y;
  }

  Value lower_polyact(int id, const Value& x) {
    Value y;
    y.layout = x.layout;
    y.clean = x.clean;
    const int degree = models_[0].node(id).as<PolyActNode>().degree();
    for (std::size_t c = 0; c < x.channels.size(); ++c) {
      auto coeff = [&](int k) {
        return per_model([&](const ModelGraph& m) {
          const auto& row = m.node(id).as<PolyActNode>().row(c);
          return static_cast<std::size_t>(k) < row.size() ? row[k] : 0.0;
        });
      };
      const Ct xc = x.channels[c];
      Ct acc;
      if (degree == 2 && all_equal(coeff(2), 1.0)) {
        // x^2 + c1 x + c0 with c1 at sublevel(x) and c0 at 2 sublevel(x).
        acc = mult_ct(xc, xc);
        auto c1 = coeff(1);
        if (!all_equal(c1, 0.0)) acc = add(acc, mult_plain(xc, plaintext(y.layout, std::move(c1), xc.lambda)));
      } else {
        acc = power_sum(xc, degree, coeff, y.layout);
      }
      auto c0 = coeff(0);
      if (!all_equal(c0, 0.0)) acc = add_plain(acc, plaintext(y.layout, std::move(c0), acc.lambda));
      y.channels.push_back(normalize(acc));
    }
    return y;
  }

  template <typename Coeff>
  Ct power_sum(const Ct& x, int degree, Coeff&& coeff, int mask) {
    if (degree < 1) {
      return mult_plain(x, plaintext(mask, std::vector<double>(models_.size(), 0.0), 1));
    }
    std::vector<Ct> pw(static_cast<std::size_t>(degree) + 1);
    pw[1] = x;
    for (int k = 2; k <= degree; ++k) {
      pw[k] = k % 2 == 0 ? normalize(mult_ct(pw[k / 2], pw[k / 2])) : normalize(mult_ct(pw[k - 1], pw[1]));
    }
    bool have = false;
    Ct acc;
    for (int k = 1; k <= degree; ++k) {
      auto ck = coeff(k);
      if (all_equal(ck, 0.0)) continue;
      Ct term = all_equal(ck, 1.0) ? pw[k] : mult_plain(pw[k], plaintext(mask, std::move(ck), 1));
      acc = have ? add(acc, term) : term;
      have = true;
    }
    if (!have) acc = mult_plain(x, plaintext(mask, std::vector<double>(models_.size(), 0.0), 1));
    return acc;
  }

  Value lower_polyskip(int id, const Value& x, const Value& yv) {
    if (!layout(x).same_placement(layout(yv)) || x.channels.size() != yv.channels.size()) {
      throw LayoutError("polyskip " + std::to_string(id) + " inputs differ in layout");
    }
    Value out;
    out.layout = x.layout;
    out.clean = x.clean && yv.clean;
    for (std::size_t c = 0; c < x.channels.size(); ++c) {
      auto coeff = [&](int i, int j) {
        return per_model([&](const ModelGraph& m) { return m.node(id).as<PolySkipNode>().coeff(c, i, j); });
      };
      const Ct xc = x.channels[c], yc = yv.channels[c];
      const int floor = std::min(xc.level, yc.level);
      const Ct xs = settle(xc, floor), ys = settle(yc, floor);
      std::vector<Ct> terms;
      auto scaled = [&](const Ct& v, std::vector<double> k) {
        return settle(normalize(mult_plain(v, plaintext(out.layout, std::move(k), 1))), floor);
      };
      if (auto k = coeff(2, 0); !all_equal(k, 0.0)) {
        terms.push_back(all_equal(k, 1.0) ? mult_ct(xs, xs) : mult_ct(scaled(xs, k), xs));
      }
      if (auto k = coeff(1, 1); !all_equal(k, 0.0)) {
        // The coefficient rides on the operand with more spare levels.
        const bool on_y = ys.level >= xs.level;
        const Ct& p = on_y ? ys : xs;
        const Ct& q = on_y ? xs : ys;
        terms.push_back(all_equal(k, 1.0) ? mult_ct(p, q) : mult_ct(scaled(p, k), q));
      }
      if (auto k = coeff(0, 2); !all_equal(k, 0.0)) {
        terms.push_back(all_equal(k, 1.0) ? mult_ct(ys, ys) : mult_ct(scaled(ys, k), ys));
      }
      // Linear terms land on the sublevel of the quadratic ones.
      int target = 0;
      for (const auto& t : terms) target = std::max(target, t.lambda);
      auto linear = [&](const Ct& v, std::vector<double> k) {
        if (target == 0) target = v.lambda + 1;
        if (all_equal(k, 1.0)) return v;
        Ct t = mult_plain(v, plaintext(out.layout, std::move(k), std::max(1, target - v.lambda)));
        return t.lambda > target ? settle(t, floor) : t;
      };
      if (auto k = coeff(1, 0); !all_equal(k, 0.0)) terms.push_back(linear(xc, k));
      if (auto k = coeff(0, 1); !all_equal(k, 0.0)) terms.push_back(linear(yc, k));
      if (terms.empty()) {
        terms.push_back(mult_plain(xc, plaintext(out.layout, std::vector<double>(models_.size(), 0.0), 1)));
      }
      Ct acc = terms[0];
      for (std::size_t t = 1; t < terms.size(); ++t) acc = add(acc, terms[t]);
      if (auto k = coeff(0, 0); !all_equal(k, 0.0)) acc = add_plain(acc, plaintext(out.layout, k, acc.lambda));
      out.channels.push_back(normalize(acc));
    }
    return out;
  }

  Value lower_add(int id, const Value& x, const Value& yv) {
    if (!layout(x).same_placement(layout(yv)) || x.channels.size() != yv.channels.size()) {
      throw LayoutError("add " + std::to_string(id) + " inputs differ in layout");
    }
    Value out;
    out.layout = x.layout;
    out.clean = x.clean && yv.clean;
    for (std::size_t c = 0; c < x.channels.size(); ++c) {
      auto wx = per_model([&](const ModelGraph& m) { return m.node(id).as<AddNode>().wx(c); });
      auto wy = per_model([&](const ModelGraph& m) { return m.node(id).as<AddNode>().wy(c); });
      Ct a = all_equal(wx, 1.0) ? x.channels[c] : mult_plain(x.channels[c], plaintext(out.layout, wx, 1));
      Ct b = all_equal(wy, 1.0) ? yv.channels[c] : mult_plain(yv.channels[c], plaintext(out.layout, wy, 1));
      const int floor = std::min(a.level, b.level);
      out.channels.push_back(normalize(add(settle(a, floor), settle(b, floor))));
    }
    return out;
  }

  Value lower_output(Value x) {
    for (auto& c : x.channels) {
      while (c.lambda > caps_[0]) {
        if (c.level < 1) throw DepthExhaustedError("output sublevel exceeds the output modulus");
        if (c.lambda <= cap(c.level)) c = scale_up(c, cap(c.level) + 1);
        c = rescale(c);
      }
    }
    int used = 0;
    const int top = static_cast<int>(caps_.size()) - 1;
    for (const auto& c : x.channels) used = std::max(used, top - c.level);
    prog_.levels_used = used;
    prog_.output_layout = x.layout;
    prog_.outputs = x.channels.size();
    Value out = x;
    for (std::size_t o = 0; o < x.channels.size(); ++o) {
      out.channels[o] = mod_switch(x.channels[o], 0);
      Instruction in;
      in.op = OpCode::kDecode;
      in.a = out.channels[o].reg;
      in.amount = static_cast<int>(o);
      in.node = current_node_;
      in.lambda = out.channels[o].lambda;
      in.level = 0;
      prog_.instructions.push_back(in);
    }
    return out;
  }

  const std::vector<ModelGraph>& models_;
  CompileOptions opts_;
  CircuitProgram prog_;
  std::vector<int> caps_;  // caps_[level] = sublevel of q_level
  std::map<int, TensorShape> shapes_;
  std::map<int, Value> values_;
  std::map<std::tuple<int, int, std::vector<std::uint64_t>>, int> pt_cache_;
  std::map<SliceTag, std::set<int>> slice_pts_;
  int next_reg_ = 0;
  int current_node_ = -1;
  int rescales_ = 0;
};

void check_ensemble(const std::vector<ModelGraph>& models) {
  if (models.empty()) throw ValidationError("lowering needs at least one model");
  for (std::size_t m = 1; m < models.size(); ++m) {
    const auto& a = models[0];
    const auto& b = models[m];
    bool same = a.size() == b.size();
    for (const auto& [id, n] : a.nodes()) {
      if (!same) break;
      same = b.contains(id) && b.node(id).kind() == n.kind() && b.node(id).inputs == n.inputs;
    }
    if (!same || a.infer_shapes() != b.infer_shapes()) {
      throw ValidationError("ensemble member " + std::to_string(m) + " differs in topology or shape");
    }
  }
}

}  // namespace

std::size_t required_margin(const ModelGraph& g) {
  std::map<int, std::size_t> step;
  std::size_t margin = 0;
  for (int id : g.topological_order()) {
    const Node& n = g.node(id);
    std::size_t s = n.inputs.empty() ? 1 : step.at(n.inputs[0]);
    if (n.kind() == NodeKind::kConv) {
      const auto& c = n.as<ConvNode>();
      margin = std::max(margin, s * c.padding);
      s *= c.stride;
    } else if (n.kind() == NodeKind::kAvgPool) {
      s = 1;
    }
    step[id] = s;
  }
  return margin;
}

int input_sublevel(const ModelGraph& g, int sublevels) {
  const auto consumers = g.consumers(g.input_id());
  const bool kernels = !consumers.empty() && std::all_of(consumers.begin(), consumers.end(), [&](int c) {
    auto k = g.node(c).kind();
    return k == NodeKind::kConv || k == NodeKind::kLinear;
  });
  return kernels ? sublevels : 1;
}

CircuitProgram lower_circuit(const std::vector<ModelGraph>& models, const ModulusChainPlan& chain,
                             const CompileOptions& options) {
  check_ensemble(models);
  chain.validate();
  if (chain.log2_delta != options.log2_delta) {
    throw ValidationError("chain scale 2^" + std::to_string(chain.log2_delta) + " differs from 2^" +
                          std::to_string(options.log2_delta));
  }
  return Lowerer(models, chain, options).run();
}

}  // namespace polyhe
