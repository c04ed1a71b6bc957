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

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "polyhe/poly/fixed_point_poly.hpp"

namespace polyhe {

struct TrainConfig {
  double clip = 2.0;   // c
  double zeta = 1e-3;  // penalty strength
  /// Warm-up factors alpha_1 < ... < alpha_T, one per warm-up epoch.
  std::vector<double> warmup{0.01, 0.02, 0.1, 0.2};
  double learning_rate = 0.05;
  std::size_t batch_size = 32;
  std::size_t epochs = 20;
  std::uint64_t seed = 0;
  /// Clip pre-activations in the training forward pass (after the penalty
  /// has been read from the unclipped values).
  bool clip_forward = true;
  /// Hidden layers (1-based) carrying the penalty; empty means all.
  std::vector<std::size_t> penalty_layers;

  /// Throws Error unless c > 0, zeta > 0 and 0 < alpha_1 < ... < alpha_T < 1.
  void validate() const;
};

/// zeta_t = alpha_t * zeta for t <= T_warm, zeta afterwards (t >= 1).
double warmup_zeta(const TrainConfig& cfg, int epoch);

struct Sample {
  Eigen::VectorXd x;
  int label = 0;
};

/// Forward-pass values of one sample. z[l] and h[l] are 1-based over hidden
/// layers; h[0] is the input.
struct ForwardCache {
  std::vector<Eigen::VectorXd> z;  // unclipped pre-activations (z[0] unused)
  std::vector<Eigen::VectorXd> h;
  Eigen::VectorXd logits;
};

/// Bias-free multilayer perceptron z(l) = W(l) h(l-1), h(l) = p(z(l)) for the
/// hidden layers and logits = W(L) h(L-1).
class TinyMLP {
 public:
  /// `widths` lists input, hidden and output sizes (at least three entries).
  TinyMLP(const std::vector<std::size_t>& widths, FixedPointPoly activation, std::uint64_t seed);

  std::size_t layers() const { return weights_.size(); }
  std::size_t hidden_layers() const { return weights_.size() - 1; }
  const Eigen::MatrixXd& weight(std::size_t l) const { return weights_.at(l - 1); }
  Eigen::MatrixXd& weight(std::size_t l) { return weights_.at(l - 1); }
  const FixedPointPoly& activation() const { return activation_; }

  /// Training pass clips with `clip` when `clip_forward`; inference passes
  /// use clip_forward = false.
  ForwardCache forward(const Eigen::VectorXd& x, bool clip_forward, double clip) const;
  Eigen::VectorXd predict(const Eigen::VectorXd& x) const;

 private:
  std::vector<Eigen::MatrixXd> weights_;
  FixedPointPoly activation_;
  std::vector<double> act_;
};

/// |z - clip(z; [-c, c])|_2.
double clip_residual_norm(const Eigen::VectorXd& z, double c);
Eigen::VectorXd clip_residual(const Eigen::VectorXd& z, double c);

struct LossParts {
  double total = 0.0;
  double ce = 0.0;
  double pen = 0.0;  // batch mean of the per-layer-averaged residual norms
};

/// Batch loss CE + zeta_t * pen. Throws Error on an empty batch.
LossParts penalty_loss(const TinyMLP& net, const std::vector<Sample>& batch,
                       const TrainConfig& cfg, int epoch);

struct Gradients {
  std::vector<Eigen::MatrixXd> dw;  // per layer, 0-based
  LossParts loss;
};

Gradients loss_gradients(const TinyMLP& net, const std::vector<Sample>& batch,
                         const TrainConfig& cfg, int epoch);

/// Cross-entropy gradient with respect to every hidden pre-activation
/// (1-based, entry 0 unused) for one sample.
std::vector<Eigen::VectorXd> ce_preactivation_gradients(const TinyMLP& net, const Sample& s,
                                                        const TrainConfig& cfg);

/// One SGD step. With `only_layer` > 0 only that layer is updated. Throws
/// Error when the loss is not finite.
LossParts train_step(TinyMLP& net, const std::vector<Sample>& batch, const TrainConfig& cfg,
                     int epoch, std::size_t only_layer = 0);

double accuracy(const TinyMLP& net, const std::vector<Sample>& data);

/// Points in [-1, 1]^2 with a constant third feature, labelled by the side of
/// a random line through the origin.
std::vector<Sample> make_separable_data(std::size_t count, std::uint64_t seed);

}  // namespace polyhe
