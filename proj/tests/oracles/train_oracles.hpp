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

#include <cmath>
#include <vector>

#include "polyhe/train/tiny_mlp.hpp"

namespace polyhe::oracle {

/// Relative norm |g_fd - g| / |g_fd| of analytic gradients against central
/// differences of penalty_loss.
inline double gradient_check(const TinyMLP& net, const std::vector<Sample>& batch, const TrainConfig& cfg,
                             int epoch, double eps = 1e-5) {
  const auto g = loss_gradients(net, batch, cfg, epoch);
  double num_sq = 0, diff_sq = 0;
  for (std::size_t l = 1; l <= net.layers(); ++l) {
    for (Eigen::Index r = 0; r < net.weight(l).rows(); ++r) {
      for (Eigen::Index c = 0; c < net.weight(l).cols(); ++c) {
        auto plus = net, minus = net;
        plus.weight(l)(r, c) += eps;
        minus.weight(l)(r, c) -= eps;
        const double fd =
            (penalty_loss(plus, batch, cfg, epoch).total - penalty_loss(minus, batch, cfg, epoch).total) / (2 * eps);
        const double an = g.dw[l - 1](r, c);
        num_sq += fd * fd;
        diff_sq += (fd - an) * (fd - an);
      }
    }
  }
  return std::sqrt(diff_sq / num_sq);
}

}  // namespace polyhe::oracle
