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

#include "polyhe/train/lemmas.hpp"

#include <cmath>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

// Pre-activation change at `layer` after one single-sample step on that layer
// with the penalty restricted to it and zeta taken past warm-up.
Eigen::VectorXd measured_update(const TinyMLP& net, const Sample& s, const TrainConfig& cfg,
                                std::size_t layer) {
  TinyMLP stepped = net;
  const int epoch = static_cast<int>(cfg.warmup.size()) + 1;
  train_step(stepped, {s}, cfg, epoch, layer);
  return stepped.forward(s.x, cfg.clip_forward, cfg.clip).z[layer] -
         net.forward(s.x, cfg.clip_forward, cfg.clip).z[layer];
}

double rel(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double n = b.norm();
  return n > 0 ? (a - b).norm() / n : (a - b).norm();
}

LemmaReport run_checks(const TinyMLP& net, const Sample& s, const TrainConfig& cfg, std::size_t layer) {
  if (layer < 1 || layer > net.hidden_layers()) throw Error("lemma check: layer must be a hidden layer");
  TrainConfig one = cfg;
  one.penalty_layers = {layer};
  TrainConfig ce_only = one;
  ce_only.zeta = 0.0;

  const auto f = net.forward(s.x, cfg.clip_forward, cfg.clip);
  const Eigen::VectorXd& h = f.h[layer - 1];
  const Eigen::VectorXd d = clip_residual(f.z[layer], cfg.clip);
  const Eigen::VectorXd g = ce_preactivation_gradients(net, s, cfg)[layer];
  const double eta = cfg.learning_rate;

  LemmaReport r;
  r.layer = layer;
  r.h_norm_sq = h.squaredNorm();
  r.d_norm = d.norm();
  r.penalty_branch = r.d_norm > 0;

  Eigen::VectorXd dz_ce = -eta * r.h_norm_sq * g;
  Eigen::VectorXd dz_pen = Eigen::VectorXd::Zero(d.size());
  if (r.penalty_branch) dz_pen = -eta * cfg.zeta * r.h_norm_sq * d / r.d_norm;

  const int epoch = static_cast<int>(cfg.warmup.size()) + 1;
  const Eigen::VectorXd from_gradient = -eta * loss_gradients(net, {s}, one, epoch).dw[layer - 1] * h;
  r.lemma1_rel_error = rel(from_gradient, dz_ce + dz_pen);
  const Eigen::VectorXd measured = measured_update(net, s, one, layer);
  r.lemma1_step_rel_error = rel(measured, dz_ce + dz_pen);

  if (r.penalty_branch) {
    const Eigen::VectorXd measured_pen = measured - measured_update(net, s, ce_only, layer);
    r.inner_product = measured_pen.dot(d);
    r.closed_form = -eta * cfg.zeta * r.h_norm_sq * r.d_norm;
    r.lemma2_rel_error = std::fabs(r.inner_product - r.closed_form) / std::fabs(r.closed_form);
  }
  return r;
}

}  // namespace

LemmaReport lemma1_check(const TinyMLP& net, const Sample& sample, const TrainConfig& cfg,
                         std::size_t layer) {
  return run_checks(net, sample, cfg, layer);
}

LemmaReport lemma2_check(const TinyMLP& net, const Sample& sample, const TrainConfig& cfg,
                         std::size_t layer) {
  return run_checks(net, sample, cfg, layer);
}

nlohmann::json to_json(const LemmaReport& r) {
  return {{"layer", r.layer},
          {"penalty_branch", r.penalty_branch},
          {"h_norm_sq", r.h_norm_sq},
          {"d_norm", r.d_norm},
          {"lemma1_rel_error", r.lemma1_rel_error},
          {"lemma1_step_rel_error", r.lemma1_step_rel_error},
          {"inner_product", r.inner_product},
          {"closed_form", r.closed_form},
          {"lemma2_rel_error", r.lemma2_rel_error}};
}

}  // namespace polyhe
