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

#include "polyhe/poly/fixed_point_poly.hpp"

#include <cmath>

#include "polyhe/errors.hpp"

namespace polyhe {

double FixedPointPoly::coefficient(int k) const {
  return std::ldexp(static_cast<double>(int_coeffs.at(k)), -frac_bits);
}

std::vector<double> FixedPointPoly::real_coeffs() const {
  std::vector<double> out(int_coeffs.size());
  for (int k = 0; k <= degree(); ++k) out[k] = coefficient(k);
  return out;
}

bool FixedPointPoly::within_box() const {
  for (auto a : int_coeffs) {
    if (a < min_coeff() || a > max_coeff()) return false;
  }
  return true;
}

double eval_real_poly(std::span<const double> coeffs, double z) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

double eval_real_poly_derivative(std::span<const double> coeffs, double z) {
  double acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) {
    acc = acc * z + static_cast<double>(k) * coeffs[k];
  }
  return acc;
}

double eval_poly(const FixedPointPoly& p, double z) {
  auto c = p.real_coeffs();
  return eval_real_poly(c, z);
}

int mult_depth(int degree, bool monic) {
  if (degree < 1) throw Error("mult_depth: degree must be >= 1");
  int ceil_log2 = 0;
  while ((1 << ceil_log2) < degree) ++ceil_log2;
  return monic ? ceil_log2 : ceil_log2 + 1;
}

}  // namespace polyhe
