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

#include "polyhe/transform/redistribution.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

std::string donor_name(int id) { return "donor " + std::to_string(id); }

double real_root(double value, int degree, int donor) {
  if (degree == 1) return value;
  if (degree % 2 == 0 && value < 0) {
    throw RedistributionError(donor_name(donor) + ": leading coefficient " + std::to_string(value) +
                              " is negative with even degree " + std::to_string(degree));
  }
  if (degree == 2) return std::sqrt(value);
  if (degree == 3) return std::cbrt(value);
  return std::copysign(std::pow(std::fabs(value), 1.0 / degree), value);
}

// Collapses a per-channel term whose entries all agree.
std::vector<double> compact(std::vector<double> v) {
  if (!v.empty() && std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; })) {
    return {v[0]};
  }
  return v;
}

template <typename Row>
void expand_rows(std::vector<Row>& rows, std::size_t n) {
  if (rows.size() == 1 && n > 1) rows.assign(n, rows[0]);
}

void expand_weights(std::vector<double>& w, std::size_t n) {
  if (w.size() == 1 && n > 1) w.assign(n, w[0]);
}

class Updater {
 public:
  Updater(ModelGraph& g, const UpdateTerm& t) : g_(g), t_(t), shapes_(g.infer_shapes()) {}

  void scale_donor() {
    Node& d = g_.mutable_node(t_.donor);
    const bool fwd = t_.direction == Direction::kForward;
    const std::size_t n = t_.upsilon.size();
    switch (d.kind()) {
      case NodeKind::kPolyAct: {
        auto& p = d.as<PolyActNode>();
        expand_rows(p.coeffs, n);
        for (std::size_t c = 0; c < p.rows(); ++c) {
          auto& row = p.coeffs[c];
          const double u = t_.at(c);
          for (std::size_t i = 0; i < row.size(); ++i) {
            row[i] = fwd ? row[i] / u : row[i] / std::pow(u, static_cast<double>(i));
          }
          if (t_.normalizes) row.back() = 1.0;
        }
        break;
      }
      case NodeKind::kPolySkip: {
        auto& p = d.as<PolySkipNode>();
        expand_rows(p.coeffs, n);
        for (std::size_t c = 0; c < p.rows(); ++c) {
          const double u = t_.at(c);
          for (auto& [ij, v] : p.coeffs[c]) {
            v = fwd ? v / u : v / std::pow(u, static_cast<double>(ij.first));
          }
          if (t_.normalizes) p.coeffs[c][{p.degree(), 0}] = 1.0;
        }
        break;
      }
      case NodeKind::kAvgPool: {
        if (n != 1) throw RedistributionError(donor_name(t_.donor) + ": pool update must be a scalar");
        d.as<AvgPoolNode>().scale /= t_.at(0);
        break;
      }
      case NodeKind::kBatchNorm: {
        auto& bn = d.as<BatchNormNode>();
        for (std::size_t c = 0; c < bn.channels(); ++c) {
          const double u = t_.at(c);
          const double b1 = bn.slope(c), b0 = bn.intercept(c);
          bn.set_affine(c, b1 / u, fwd ? b0 / u : b0);
        }
        break;
      }
      default:
        throw RedistributionError(donor_name(t_.donor) + ": " + to_string(d.kind()) +
                                  " cannot donate an update");
    }
  }

  // Consumers of `producer` see their input divided by the update.
  void receive_forward(int producer) {
    std::set<int> seen;
    auto consumers = g_.consumers(producer);
    if (consumers.empty()) {
      throw RedistributionError(donor_name(t_.donor) + ": node " + std::to_string(producer) +
                                " has no consumer to receive the update");
    }
    for (int r : consumers) {
      if (!seen.insert(r).second) continue;
      Node& n = g_.mutable_node(r);
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        if (n.inputs[k] == producer) forward_edge(n, k);
      }
    }
  }

  // The producer of the donor's input is multiplied by the update.
  void receive_backward(int consumer, int producer) {
    auto consumers = g_.consumers(producer);
    if (consumers.size() != 1 || consumers[0] != consumer) {
      throw RedistributionError(donor_name(t_.donor) + ": producer " + std::to_string(producer) +
                                " feeds other nodes and cannot absorb the update");
    }
    Node& n = g_.mutable_node(producer);
    const std::size_t channels = shapes_.at(producer).channels;
    switch (n.kind()) {
      case NodeKind::kConv: {
        auto& c = n.as<ConvNode>();
        const std::size_t per_out = c.in_channels * c.kernel_h * c.kernel_w;
        for (std::size_t o = 0; o < c.out_channels; ++o) {
          const double u = t_.at(o);
          for (std::size_t k = 0; k < per_out; ++k) c.weights[o * per_out + k] *= u;
          c.bias[o] *= u;
        }
        break;
      }
      case NodeKind::kLinear: {
        auto& l = n.as<LinearNode>();
        for (std::size_t o = 0; o < l.out_features; ++o) {
          const double u = t_.at(o);
          for (std::size_t i = 0; i < l.in_features; ++i) l.weights[o * l.in_features + i] *= u;
          l.bias[o] *= u;
        }
        break;
      }
      case NodeKind::kPolyAct: {
        auto& p = n.as<PolyActNode>();
        if (t_.upsilon.size() > 1) expand_rows(p.coeffs, channels);
        for (std::size_t c = 0; c < p.rows(); ++c) {
          for (double& v : p.coeffs[c]) v *= t_.at(c);
        }
        break;
      }
      case NodeKind::kPolySkip: {
        auto& p = n.as<PolySkipNode>();
        if (t_.upsilon.size() > 1) expand_rows(p.coeffs, channels);
        for (std::size_t c = 0; c < p.rows(); ++c) {
          for (auto& [ij, v] : p.coeffs[c]) v *= t_.at(c);
        }
        break;
      }
      case NodeKind::kBatchNorm: {
        auto& bn = n.as<BatchNormNode>();
        for (std::size_t c = 0; c < bn.channels(); ++c) {
          bn.set_affine(c, bn.slope(c) * t_.at(c), bn.intercept(c) * t_.at(c));
        }
        break;
      }
      case NodeKind::kAdd: {
        auto& a = n.as<AddNode>();
        if (t_.upsilon.size() > 1) {
          expand_weights(a.weight_x, channels);
          expand_weights(a.weight_y, channels);
        }
        for (std::size_t c = 0; c < a.weight_x.size(); ++c) a.weight_x[c] *= t_.at(c);
        for (std::size_t c = 0; c < a.weight_y.size(); ++c) a.weight_y[c] *= t_.at(c);
        break;
      }
      case NodeKind::kAvgPool:
        receive_backward(producer, n.inputs[0]);
        break;
      default:
        throw RedistributionError(donor_name(t_.donor) + ": " + to_string(n.kind()) + " node " +
                                  std::to_string(producer) + " cannot receive a backward update");
    }
    receivers_.push_back(producer);
  }

  const std::vector<int>& receivers() const { return receivers_; }

 private:
  void forward_edge(Node& n, std::size_t k) {
    const TensorShape in = shapes_.at(n.inputs[k]);
    switch (n.kind()) {
      case NodeKind::kConv: {
        auto& c = n.as<ConvNode>();
        const std::size_t taps = c.kernel_h * c.kernel_w;
        for (std::size_t o = 0; o < c.out_channels; ++o) {
          for (std::size_t i = 0; i < c.in_channels; ++i) {
            const double u = t_.at(i);
            for (std::size_t t = 0; t < taps; ++t) c.weights[(o * c.in_channels + i) * taps + t] *= u;
          }
        }
        break;
      }
      case NodeKind::kLinear: {
        auto& l = n.as<LinearNode>();
        const std::size_t plane = in.height * in.width;
        for (std::size_t o = 0; o < l.out_features; ++o) {
          for (std::size_t i = 0; i < l.in_features; ++i) l.weights[o * l.in_features + i] *= t_.at(i / plane);
        }
        break;
      }
      case NodeKind::kPolyAct: {
        auto& p = n.as<PolyActNode>();
        if (t_.upsilon.size() > 1) expand_rows(p.coeffs, in.channels);
        for (std::size_t c = 0; c < p.rows(); ++c) {
          auto& row = p.coeffs[c];
          for (std::size_t i = 0; i < row.size(); ++i) row[i] *= std::pow(t_.at(c), static_cast<double>(i));
        }
        break;
      }
      case NodeKind::kPolySkip: {
        auto& p = n.as<PolySkipNode>();
        if (t_.upsilon.size() > 1) expand_rows(p.coeffs, in.channels);
        for (std::size_t c = 0; c < p.rows(); ++c) {
          for (auto& [ij, v] : p.coeffs[c]) {
            v *= std::pow(t_.at(c), static_cast<double>(k == 0 ? ij.first : ij.second));
          }
        }
        break;
      }
      case NodeKind::kBatchNorm: {
        auto& bn = n.as<BatchNormNode>();
        for (std::size_t c = 0; c < bn.channels(); ++c) {
          bn.set_affine(c, bn.slope(c) * t_.at(c), bn.intercept(c));
        }
        break;
      }
      case NodeKind::kAdd: {
        auto& a = n.as<AddNode>();
        auto& w = k == 0 ? a.weight_x : a.weight_y;
        if (t_.upsilon.size() > 1) expand_weights(w, in.channels);
        for (std::size_t c = 0; c < w.size(); ++c) w[c] *= t_.at(c);
        break;
      }
      case NodeKind::kAvgPool:
        receive_forward(n.id);
        return;
      default:
        throw RedistributionError(donor_name(t_.donor) + ": path reaches " + to_string(n.kind()) +
                                  " node " + std::to_string(n.id) + " without an eligible receiver");
    }
    receivers_.push_back(n.id);
  }

  ModelGraph& g_;
  const UpdateTerm& t_;
  std::map<int, TensorShape> shapes_;
  std::vector<int> receivers_;
};

}  // namespace

bool UpdateTerm::identity() const {
  return std::all_of(upsilon.begin(), upsilon.end(), [](double u) { return u == 1.0; });
}

UpdateTerm normalizing_term(const ModelGraph& g, int donor, Direction direction) {
  const Node& n = g.node(donor);
  UpdateTerm t;
  t.donor = donor;
  t.direction = direction;
  const bool back = direction == Direction::kBackward;
  std::vector<double> u;
  switch (n.kind()) {
    case NodeKind::kPolyAct: {
      const auto& p = n.as<PolyActNode>();
      for (const auto& row : p.coeffs) {
        const double lead = row.back();
        if (lead == 0.0) throw RedistributionError(donor_name(donor) + ": leading coefficient is zero");
        u.push_back(back ? real_root(lead, static_cast<int>(row.size()) - 1, donor) : lead);
      }
      break;
    }
    case NodeKind::kPolySkip: {
      const auto& p = n.as<PolySkipNode>();
      const int d = p.degree();
      for (std::size_t c = 0; c < p.rows(); ++c) {
        const double lead = p.leading_x(c);
        if (lead == 0.0) throw RedistributionError(donor_name(donor) + ": x^d coefficient is zero");
        u.push_back(back ? real_root(lead, d, donor) : lead);
      }
      break;
    }
    case NodeKind::kAvgPool:
      u.push_back(n.as<AvgPoolNode>().scale);
      break;
    case NodeKind::kBatchNorm: {
      const auto& bn = n.as<BatchNormNode>();
      for (std::size_t c = 0; c < bn.channels(); ++c) {
        if (bn.slope(c) == 0.0) throw RedistributionError(donor_name(donor) + ": batch norm slope is zero");
        u.push_back(bn.slope(c));
      }
      break;
    }
    default:
      throw RedistributionError(donor_name(donor) + ": " + to_string(n.kind()) + " cannot donate an update");
  }
  t.upsilon = compact(std::move(u));
  t.normalizes = true;
  return t;
}

std::vector<int> apply_update_term(ModelGraph& g, const UpdateTerm& term) {
  for (double u : term.upsilon) {
    if (u == 0.0 || !std::isfinite(u)) {
      throw RedistributionError(donor_name(term.donor) + ": update term must be finite and nonzero");
    }
  }
  ModelGraph work = g;
  Updater up(work, term);
  up.scale_donor();
  const Node& d = work.node(term.donor);
  if (term.direction == Direction::kForward) {
    up.receive_forward(term.donor);
  } else {
    up.receive_backward(term.donor, d.inputs[0]);
  }
  auto receivers = up.receivers();
  g = std::move(work);
  return receivers;
}

UpdateTerm redistribute_forward(ModelGraph& g, int donor) {
  UpdateTerm t = normalizing_term(g, donor, Direction::kForward);
  apply_update_term(g, t);
  return t;
}

UpdateTerm redistribute_backward(ModelGraph& g, int donor) {
  UpdateTerm t = normalizing_term(g, donor, Direction::kBackward);
  apply_update_term(g, t);
  return t;
}

std::vector<RedistributionStep> redistribute_all(ModelGraph& g) {
  std::vector<RedistributionStep> steps;
  auto order = g.topological_order();
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (g.node(*it).kind() != NodeKind::kBatchNorm) continue;
    UpdateTerm t = normalizing_term(g, *it, Direction::kBackward);
    steps.push_back({t, apply_update_term(g, t)});
  }
  for (int id : order) {
    auto kind = g.node(id).kind();
    if (kind != NodeKind::kPolyAct && kind != NodeKind::kPolySkip && kind != NodeKind::kAvgPool) continue;
    UpdateTerm t = normalizing_term(g, id, Direction::kForward);
    steps.push_back({t, apply_update_term(g, t)});
  }
  return steps;
}

}  // namespace polyhe
