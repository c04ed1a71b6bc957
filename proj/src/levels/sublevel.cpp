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

#include "polyhe/levels/sublevel.hpp"

#include <cmath>
#include <string>

#include "polyhe/errors.hpp"

namespace polyhe {

int sublevel(double scale, double delta) {
  if (!(scale > 0) || !(delta > 1)) throw Error("sublevel: need scale > 0 and delta > 1");
  return sublevel_log2(std::log2(scale), std::log2(delta));
}

int sublevel_log2(double log2_scale, double log2_delta) {
  if (!(log2_delta > 0)) throw Error("sublevel: need delta > 1");
  return static_cast<int>(std::lround(log2_scale / log2_delta));
}

CiphertextMeta CiphertextMeta::make(double scale, double delta, int level) {
  return {scale, level, polyhe::sublevel(scale, delta)};
}

bool needs_rescale(const CiphertextMeta& x, int modulus_sublevel) {
  if (x.sublevel <= modulus_sublevel) return false;
  if (x.level <= 0) {
    throw DepthExhaustedError("rescale required at sublevel " + std::to_string(x.sublevel) +
                              " but no modulus is left");
  }
  return true;
}

CiphertextMeta apply_rescale(const CiphertextMeta& x, double q, int modulus_sublevel) {
  if (x.level <= 0) throw DepthExhaustedError("rescale at level zero");
  return {x.scale / q, x.level - 1, x.sublevel - modulus_sublevel};
}

}  // namespace polyhe
