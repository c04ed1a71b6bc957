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

#include <cstddef>
#include <vector>

#include "json.hpp"

namespace polyhe {

/// HW slot layout: one channel per ciphertext, its h x w values on a padded
/// grid_h x grid_w grid, repeated in `regions` slot regions of `region_size`
/// slots (one region per ensemble member). Logical (i, j) sits at grid
/// position (origin_row + step * i, origin_col + step * j); strided
/// convolutions multiply `step` instead of compacting. Slots with no logical
/// coordinate are gaps.
struct SlotLayout {
  std::size_t slots = 0;  // N / 2
  std::size_t regions = 1;
  std::size_t region_size = 0;
  std::size_t grid_h = 0;
  std::size_t grid_w = 0;
  std::size_t origin_row = 0;
  std::size_t origin_col = 0;
  std::size_t step = 1;
  std::size_t height = 0;
  std::size_t width = 0;

  std::size_t slot(std::size_t region, std::size_t i, std::size_t j) const {
    return region * region_size + (origin_row + step * i) * grid_w + origin_col + step * j;
  }
  /// Region of a slot index.
  std::size_t region_of(std::size_t s) const { return s / region_size; }
  /// Occupied slots, region-major then row-major.
  std::vector<std::size_t> valid_slots() const;
  /// True for gap slots.
  std::vector<bool> gap_mask() const;

  /// Same geometry (ignoring the slot count).
  bool same_placement(const SlotLayout& o) const;
  /// Layout of a convolution output: stride multiplies the step.
  SlotLayout after_conv(std::size_t out_h, std::size_t out_w, std::size_t stride) const;
  /// Single value per region at grid position (0, 0).
  SlotLayout pooled() const;
};

/// Layout of an h x w input with `margin` zero rows and columns on every side,
/// in `regions` regions of power-of-two size. `slots` = 0 picks the smallest
/// power of two that fits; CapacityError when `slots` is too small.
SlotLayout make_input_layout(std::size_t h, std::size_t w, std::size_t margin, std::size_t regions,
                             std::size_t slots = 0);

nlohmann::json to_json(const SlotLayout& l);
SlotLayout layout_from_json(const nlohmann::json& j);

}  // namespace polyhe
