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

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace polyhe {

/// Polynomial with integer coefficients a_k interpreted as a_k / 2^b, fitted
/// on the interval [-interval, interval].
struct FixedPointPoly {
  std::vector<std::int64_t> int_coeffs;  // a_0 .. a_d
  int frac_bits = 10;
  double interval = 2.0;

  int degree() const { return static_cast<int>(int_coeffs.size()) - 1; }
  double coefficient(int k) const;
  std::vector<double> real_coeffs() const;

  std::int64_t min_coeff() const { return -(std::int64_t{1} << (frac_bits - 1)); }
  std::int64_t max_coeff() const { return (std::int64_t{1} << (frac_bits - 1)) - 1; }
  /// True when every a_k lies in [-2^(b-1), 2^(b-1) - 1].
  bool within_box() const;
};

struct FitReport {
  double max_abs_error = 0.0;  // over the quantized domain, real units
  double sum_sq_error = 0.0;   // real units
  double objective = 0.0;      // ||BA - Y||^2 in 2^b-scaled units
  std::vector<int> truncated_terms;
};

struct FitResult {
  FixedPointPoly poly;
  FitReport report;
};

/// Grid {k * 2^-b} intersected with [-c, c], ascending.
std::vector<double> quantized_domain(double interval, int frac_bits);

/// Quantization-aware least-squares fit of ReLU: bounded integer least squares
/// over the quantized domain. Throws Error when the domain has fewer than
/// degree + 1 points or arguments are out of range.
FitResult fit_relu_poly(int degree, double interval, int frac_bits);

/// Same solver against an arbitrary target function.
FitResult fit_fixed_point_poly(int degree, double interval, int frac_bits,
                               const std::function<double(double)>& target);

/// ||BA - Y||^2 in scaled units for the given integer coefficients.
double fit_objective(std::span<const std::int64_t> coeffs, double interval,
                     int frac_bits, const std::function<double(double)>& target);

/// Horner evaluation of sum (a_k / 2^b) z^k.
double eval_poly(const FixedPointPoly& p, double z);

/// Horner evaluation of a real-coefficient polynomial (c_0 first).
double eval_real_poly(std::span<const double> coeffs, double z);

/// Derivative of a real-coefficient polynomial at z.
double eval_real_poly_derivative(std::span<const double> coeffs, double z);

/// Multiplicative depth ceil(log2(d) + 1); with `monic` the leading
/// coefficient multiplication is dropped, giving ceil(log2(d)).
int mult_depth(int degree, bool monic = false);

}  // namespace polyhe
