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

#include <vector>

#include "polyhe/graph/graph.hpp"

namespace polyhe {

enum class Direction { kForward, kBackward };

/// Scale moved out of a donor. `upsilon` holds one value per channel of the
/// donor output, or a single value for all channels.
struct UpdateTerm {
  std::vector<double> upsilon{1.0};
  Direction direction = Direction::kForward;
  int donor = -1;
  /// Set for normalizing terms: the donor's leading coefficient is then
  /// stored as exactly one rather than as the rounded quotient.
  bool normalizes = false;

  double at(std::size_t c) const { return upsilon.size() == 1 ? upsilon[0] : upsilon[c]; }
  bool identity() const;
};

/// Update term that normalizes `donor` (leading coefficient, batch-norm slope
/// or pool divisor to one) in the given direction. Throws RedistributionError
/// for a zero leading coefficient or, backward, an even-degree polynomial
/// with a negative leading coefficient.
UpdateTerm normalizing_term(const ModelGraph& g, int donor, Direction direction);

/// Divides the donor by the update and multiplies the receivers, keeping the
/// model function. Forward receivers are the consumers (pools are crossed);
/// backward receivers are the producer, which must feed only the donor.
/// Returns the receiver ids. The graph is unchanged when an error is thrown.
std::vector<int> apply_update_term(ModelGraph& g, const UpdateTerm& term);

/// Normalizes `donor` by pushing its scale to the consumers.
UpdateTerm redistribute_forward(ModelGraph& g, int donor);
/// Normalizes `donor` by pulling its scale into the producer.
UpdateTerm redistribute_backward(ModelGraph& g, int donor);

struct RedistributionStep {
  UpdateTerm term;
  std::vector<int> receivers;
};

/// Normalizes every batch norm (backward, reverse topological order), then
/// every activation, polyskip and pool (forward, topological order).
std::vector<RedistributionStep> redistribute_all(ModelGraph& g);

}  // namespace polyhe
