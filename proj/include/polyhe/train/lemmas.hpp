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

#include "json.hpp"
#include "polyhe/train/tiny_mlp.hpp"

namespace polyhe {

/// Measured against predicted pre-activation updates after one SGD step on a
/// single sample that touches only W(layer), with the penalty on that layer.
struct LemmaReport {
  std::size_t layer = 1;
  bool penalty_branch = false;  // false when the clip residual is zero
  double h_norm_sq = 0.0;
  double d_norm = 0.0;
  /// |dz - dz_formula| / |dz_formula| with dz = -eta dW(layer) h from
  /// backpropagation.
  double lemma1_rel_error = 0.0;
  /// Same with dz measured by taking the step and differencing forward
  /// passes; limited by eps |W| |h| / |dz| in double precision.
  double lemma1_step_rel_error = 0.0;
  double inner_product = 0.0;     // <dz_pen, d>, dz_pen measured
  double closed_form = 0.0;       // -eta zeta |h|^2 |d|
  double lemma2_rel_error = 0.0;

  bool lemma1_holds(double tol) const { return lemma1_rel_error <= tol; }
  bool lemma2_holds(double tol) const {
    return !penalty_branch || (inner_product < 0 && lemma2_rel_error <= tol);
  }
};

LemmaReport lemma1_check(const TinyMLP& net, const Sample& sample, const TrainConfig& cfg,
                         std::size_t layer);
LemmaReport lemma2_check(const TinyMLP& net, const Sample& sample, const TrainConfig& cfg,
                         std::size_t layer);

nlohmann::json to_json(const LemmaReport& r);

}  // namespace polyhe
