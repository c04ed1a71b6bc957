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

#include "polyhe/train/tiny_mlp.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polyhe/errors.hpp"

namespace polyhe {

void TrainConfig::validate() const {
  if (!(clip > 0)) throw Error("train: clip bound c must be positive");
  if (!(zeta > 0)) throw Error("train: zeta must be positive");
  if (!(learning_rate >= 0)) throw Error("train: learning rate must be non-negative");
  if (batch_size == 0) throw Error("train: batch size must be positive");
  for (std::size_t t = 0; t < warmup.size(); ++t) {
    if (!(warmup[t] > 0 && warmup[t] < 1) || (t > 0 && !(warmup[t] > warmup[t - 1]))) {
      throw Error("train: warm-up factors must increase strictly inside (0, 1)");
    }
  }
}

double warmup_zeta(const TrainConfig& cfg, int epoch) {
  if (epoch < 1) throw Error("warmup_zeta: epochs are numbered from 1");
  const auto t = static_cast<std::size_t>(epoch);
  return t <= cfg.warmup.size() ? cfg.warmup[t - 1] * cfg.zeta : cfg.zeta;
}

TinyMLP::TinyMLP(const std::vector<std::size_t>& widths, FixedPointPoly activation,
                 std::uint64_t seed)
    : activation_(std::move(activation)), act_(activation_.real_coeffs()) {
  if (widths.size() < 3) throw Error("TinyMLP: need input, at least one hidden and output width");
  std::mt19937_64 rng(seed);
  for (std::size_t l = 1; l < widths.size(); ++l) {
    const double bound = std::sqrt(3.0 / static_cast<double>(widths[l - 1]));
    std::uniform_real_distribution<double> u(-bound, bound);
    Eigen::MatrixXd w(static_cast<Eigen::Index>(widths[l]), static_cast<Eigen::Index>(widths[l - 1]));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = u(rng);
    }
    weights_.push_back(std::move(w));
  }
}

ForwardCache TinyMLP::forward(const Eigen::VectorXd& x, bool clip_forward, double clip) const {
  ForwardCache f;
  f.z.resize(layers());
  f.h.resize(layers());
  f.h[0] = x;
  for (std::size_t l = 1; l < layers(); ++l) {
    f.z[l] = weights_[l - 1] * f.h[l - 1];
    Eigen::VectorXd a = f.z[l];
    if (clip_forward) a = a.cwiseMax(-clip).cwiseMin(clip);
    f.h[l] = a.unaryExpr([&](double v) { return eval_real_poly(act_, v); });
  }
  f.logits = weights_.back() * f.h.back();
  return f;
}

Eigen::VectorXd TinyMLP::predict(const Eigen::VectorXd& x) const { return forward(x, false, 0.0).logits; }

Eigen::VectorXd clip_residual(const Eigen::VectorXd& z, double c) {
  return z - z.cwiseMax(-c).cwiseMin(c);
}

double clip_residual_norm(const Eigen::VectorXd& z, double c) { return clip_residual(z, c).norm(); }

namespace {

bool penalized(const TrainConfig& cfg, std::size_t l) {
  return cfg.penalty_layers.empty() ||
         std::find(cfg.penalty_layers.begin(), cfg.penalty_layers.end(), l) != cfg.penalty_layers.end();
}

std::size_t penalized_count(const TrainConfig& cfg, const TinyMLP& net) {
  std::size_t n = 0;
  for (std::size_t l = 1; l <= net.hidden_layers(); ++l) n += penalized(cfg, l);
  return n;
}

Eigen::VectorXd softmax(const Eigen::VectorXd& v) {
  Eigen::VectorXd e = (v.array() - v.maxCoeff()).exp();
  return e / e.sum();
}

double cross_entropy(const Eigen::VectorXd& logits, int label) {
  const double m = logits.maxCoeff();
  return std::log((logits.array() - m).exp().sum()) + m - logits(label);
}

// Backpropagates `delta_out` (gradient at the logits) and per-layer direct
// pre-activation gradients, accumulating weight gradients into `dw` and
// returning the gradient at each hidden pre-activation.
std::vector<Eigen::VectorXd> backprop(const TinyMLP& net, const ForwardCache& f,
                                      const Eigen::VectorXd& delta_out,
                                      const std::vector<Eigen::VectorXd>& direct,
                                      const TrainConfig& cfg, std::vector<Eigen::MatrixXd>* dw) {
  const auto coeffs = net.activation().real_coeffs();
  const std::size_t L = net.layers();
  std::vector<Eigen::VectorXd> delta(L);
  Eigen::VectorXd up = delta_out;
  if (dw) (*dw)[L - 1] += up * f.h[L - 1].transpose();
  for (std::size_t l = L - 1; l >= 1; --l) {
    Eigen::VectorXd gh = net.weight(l + 1).transpose() * up;
    Eigen::VectorXd dz(gh.size());
    for (Eigen::Index k = 0; k < gh.size(); ++k) {
      double z = f.z[l](k);
      bool inside = !cfg.clip_forward || std::fabs(z) <= cfg.clip;
      double a = cfg.clip_forward ? std::clamp(z, -cfg.clip, cfg.clip) : z;
      dz(k) = inside ? gh(k) * eval_real_poly_derivative(coeffs, a) : 0.0;
    }
    if (!direct.empty() && direct[l].size() > 0) dz += direct[l];
    delta[l] = dz;
    if (dw) (*dw)[l - 1] += dz * f.h[l - 1].transpose();
    up = dz;
  }
  return delta;
}

}  // namespace

LossParts penalty_loss(const TinyMLP& net, const std::vector<Sample>& batch, const TrainConfig& cfg,
                       int epoch) {
  if (batch.empty()) throw Error("penalty_loss: empty batch");
  const std::size_t np = penalized_count(cfg, net);
  LossParts out;
  for (const auto& s : batch) {
    auto f = net.forward(s.x, cfg.clip_forward, cfg.clip);
    out.ce += cross_entropy(f.logits, s.label);
    double pen = 0.0;
    for (std::size_t l = 1; l <= net.hidden_layers(); ++l) {
      if (penalized(cfg, l)) pen += clip_residual_norm(f.z[l], cfg.clip);
    }
    if (np > 0) out.pen += pen / static_cast<double>(np);
  }
  const auto n = static_cast<double>(batch.size());
  out.ce /= n;
  out.pen /= n;
  out.total = out.ce + warmup_zeta(cfg, epoch) * out.pen;
  return out;
}

Gradients loss_gradients(const TinyMLP& net, const std::vector<Sample>& batch, const TrainConfig& cfg,
                         int epoch) {
  if (batch.empty()) throw Error("loss_gradients: empty batch");
  Gradients g;
  for (std::size_t l = 1; l <= net.layers(); ++l) {
    g.dw.push_back(Eigen::MatrixXd::Zero(net.weight(l).rows(), net.weight(l).cols()));
  }
  const auto n = static_cast<double>(batch.size());
  const std::size_t np = penalized_count(cfg, net);
  const double zeta_t = warmup_zeta(cfg, epoch);
  for (const auto& s : batch) {
    auto f = net.forward(s.x, cfg.clip_forward, cfg.clip);
    Eigen::VectorXd delta = softmax(f.logits);
    delta(s.label) -= 1.0;
    delta /= n;
    std::vector<Eigen::VectorXd> direct(net.layers());
    for (std::size_t l = 1; l <= net.hidden_layers(); ++l) {
      if (!penalized(cfg, l)) continue;
      Eigen::VectorXd d = clip_residual(f.z[l], cfg.clip);
      const double norm = d.norm();
      if (norm > 0) direct[l] = zeta_t / (n * static_cast<double>(np)) * d / norm;
    }
    backprop(net, f, delta, direct, cfg, &g.dw);
  }
  g.loss = penalty_loss(net, batch, cfg, epoch);
  return g;
}

std::vector<Eigen::VectorXd> ce_preactivation_gradients(const TinyMLP& net, const Sample& s,
                                                        const TrainConfig& cfg) {
  auto f = net.forward(s.x, cfg.clip_forward, cfg.clip);
  Eigen::VectorXd delta = softmax(f.logits);
  delta(s.label) -= 1.0;
  return backprop(net, f, delta, {}, cfg, nullptr);
}

LossParts train_step(TinyMLP& net, const std::vector<Sample>& batch, const TrainConfig& cfg, int epoch,
                     std::size_t only_layer) {
  auto g = loss_gradients(net, batch, cfg, epoch);
  if (!std::isfinite(g.loss.total)) throw Error("train_step: loss is not finite");
  for (std::size_t l = 1; l <= net.layers(); ++l) {
    if (only_layer != 0 && l != only_layer) continue;
    net.weight(l) -= cfg.learning_rate * g.dw[l - 1];
  }
  return g.loss;
}

double accuracy(const TinyMLP& net, const std::vector<Sample>& data) {
  if (data.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : data) {
    Eigen::Index arg = 0;
    net.predict(s.x).maxCoeff(&arg);
    hits += arg == s.label;
  }
  return static_cast<double>(hits) / static_cast<double>(data.size());
}

std::vector<Sample> make_separable_data(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_real_distribution<double> angle(0.0, 2 * M_PI);
  const double a = angle(rng);
  const double nx = std::cos(a), ny = std::sin(a);
  std::vector<Sample> out;
  while (out.size() < count) {
    double x = u(rng), y = u(rng);
    double side = nx * x + ny * y;
    if (std::fabs(side) < 0.05) continue;
    Eigen::VectorXd v(3);
    v << x, y, 1.0;
    out.push_back({v, side > 0 ? 1 : 0});
  }
  return out;
}

}  // namespace polyhe
