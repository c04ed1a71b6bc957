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

namespace polyhe {

/// round(log_delta(scale)), ties away from zero.
int sublevel(double scale, double delta);
/// Same computed from base-2 logarithms, for scales beyond double range.
int sublevel_log2(double log2_scale, double log2_delta);

/// Scale, level and sublevel of a ciphertext.
struct CiphertextMeta {
  double scale = 0.0;  // Delta_x
  int level = 0;       // rescale moduli still available
  int sublevel = 0;    // round(log_Delta Delta_x)

  static CiphertextMeta make(double scale, double delta, int level);
};

/// True iff the ciphertext sublevel exceeds the capacity of the next modulus.
/// Throws DepthExhaustedError when a rescale is required at level zero.
bool needs_rescale(const CiphertextMeta& x, int modulus_sublevel);

/// Drops modulus q (value `q`, sublevel `modulus_sublevel`): level - 1,
/// scale / q, sublevel - modulus_sublevel. Throws DepthExhaustedError at
/// level zero.
CiphertextMeta apply_rescale(const CiphertextMeta& x, double q, int modulus_sublevel);

}  // namespace polyhe
