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

#include "polyhe/sim/layout.hpp"

#include <bit>

#include "polyhe/errors.hpp"

namespace polyhe {

std::vector<std::size_t> SlotLayout::valid_slots() const {
  std::vector<std::size_t> out;
  out.reserve(regions * height * width);
  for (std::size_t r = 0; r < regions; ++r)
    for (std::size_t i = 0; i < height; ++i)
      for (std::size_t j = 0; j < width; ++j) out.push_back(slot(r, i, j));
  return out;
}

std::vector<bool> SlotLayout::gap_mask() const {
  std::vector<bool> gaps(slots, true);
  for (std::size_t s : valid_slots()) gaps[s] = false;
  return gaps;
}

bool SlotLayout::same_placement(const SlotLayout& o) const {
  return regions == o.regions && region_size == o.region_size && grid_w == o.grid_w &&
         grid_h == o.grid_h && origin_row == o.origin_row && origin_col == o.origin_col &&
         step == o.step && height == o.height && width == o.width;
}

SlotLayout SlotLayout::after_conv(std::size_t out_h, std::size_t out_w, std::size_t stride) const {
  SlotLayout out = *this;
  out.step = step * stride;
  out.height = out_h;
  out.width = out_w;
  return out;
}

SlotLayout SlotLayout::pooled() const {
  SlotLayout out = *this;
  out.origin_row = out.origin_col = 0;
  out.step = 1;
  out.height = out.width = 1;
  return out;
}

SlotLayout make_input_layout(std::size_t h, std::size_t w, std::size_t margin, std::size_t regions,
                             std::size_t slots) {
  if (h == 0 || w == 0 || regions == 0) throw LayoutError("layout needs a nonempty grid and region");
  SlotLayout l;
  l.regions = regions;
  l.grid_h = h + 2 * margin;
  l.grid_w = w + 2 * margin;
  l.region_size = std::bit_ceil(l.grid_h * l.grid_w);
  l.origin_row = l.origin_col = margin;
  l.height = h;
  l.width = w;
  const std::size_t need = std::bit_ceil(regions * l.region_size);
  if (slots == 0) {
    l.slots = need;
  } else {
    if (slots < regions * l.region_size) {
      throw CapacityError(std::to_string(regions) + " regions of " + std::to_string(l.region_size) +
                          " slots exceed " + std::to_string(slots) + " slots");
    }
    l.slots = slots;
  }
  return l;
}

nlohmann::json to_json(const SlotLayout& l) {
  return {{"slots", l.slots},           {"regions", l.regions},   {"region_size", l.region_size},
          {"grid", {l.grid_h, l.grid_w}}, {"origin", {l.origin_row, l.origin_col}},
          {"step", l.step},             {"shape", {l.height, l.width}}};
}

SlotLayout layout_from_json(const nlohmann::json& j) {
  SlotLayout l;
  l.slots = j.at("slots");
  l.regions = j.at("regions");
  l.region_size = j.at("region_size");
  l.grid_h = j.at("grid").at(0);
  l.grid_w = j.at("grid").at(1);
  l.origin_row = j.at("origin").at(0);
  l.origin_col = j.at("origin").at(1);
  l.step = j.at("step");
  l.height = j.at("shape").at(0);
  l.width = j.at("shape").at(1);
  return l;
}

}  // namespace polyhe
