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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "polyhe/errors.hpp"
#include "polyhe/poly/fixed_point_poly.hpp"

namespace polyhe {

namespace {

using Coeffs = std::vector<std::int64_t>;

// Quadratic form of the integer LSQ objective:
//   f(A) = A^T G A - 2 h^T A + y2,  G = B^T B, h = B^T Y.
struct NormalForm {
  std::vector<long double> gram;  // row-major (d+1)^2
  std::vector<long double> rhs;
  long double y2 = 0;
  int n = 0;

  long double value(const Coeffs& a) const {
    long double f = y2;
    for (int i = 0; i < n; ++i) {
      long double gi = 0;
      for (int j = 0; j < n; ++j) gi += gram[i * n + j] * static_cast<long double>(a[j]);
      f += static_cast<long double>(a[i]) * (gi - 2 * rhs[i]);
    }
    return f;
  }
};

NormalForm build_normal_form(const std::vector<double>& xs,
                             const std::vector<double>& ys, int degree) {
  NormalForm nf;
  nf.n = degree + 1;
  nf.gram.assign(nf.n * nf.n, 0);
  nf.rhs.assign(nf.n, 0);
  std::vector<long double> pw(2 * degree + 1);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    long double x = xs[i];
    pw[0] = 1;
    for (int k = 1; k <= 2 * degree; ++k) pw[k] = pw[k - 1] * x;
    for (int r = 0; r < nf.n; ++r) {
      for (int c = 0; c < nf.n; ++c) nf.gram[r * nf.n + c] += pw[r + c];
      nf.rhs[r] += pw[r] * static_cast<long double>(ys[i]);
    }
    nf.y2 += static_cast<long double>(ys[i]) * ys[i];
  }
  return nf;
}

// Repeated best-improvement search over the full {-1,0,1}^(d+1) neighborhood
// until the incumbent is optimal within it. Neighbors are visited in a fixed
// lexicographic order.
void neighborhood_descent(const NormalForm& nf, Coeffs& a, std::int64_t lo,
                          std::int64_t hi) {
  const int n = nf.n;
  long double best = nf.value(a);
  int combos = 1;
  for (int i = 0; i < n; ++i) combos *= 3;
  for (;;) {
    Coeffs best_cand = a;
    long double best_val = best;
    Coeffs cand(n);
    for (int code = 0; code < combos; ++code) {
      int rest = code;
      bool ok = true;
      bool moved = false;
      for (int i = 0; i < n; ++i) {
        int step = rest % 3 - 1;
        rest /= 3;
        cand[i] = a[i] + step;
        moved |= step != 0;
        if (cand[i] < lo || cand[i] > hi) ok = false;
      }
      if (!ok || !moved) continue;
      long double v = nf.value(cand);
      long double tol = 1e-12L * (1 + std::fabs(best_val));
      if (v < best_val - tol) {
        best_val = v;
        best_cand = cand;
      }
    }
    if (best_cand == a) return;
    a = best_cand;
    best = best_val;
  }
}

}  // namespace

std::vector<double> quantized_domain(double interval, int frac_bits) {
  const double scale = std::ldexp(1.0, frac_bits);
  auto k_lo = static_cast<long long>(std::ceil(-interval * scale));
  auto k_hi = static_cast<long long>(std::floor(interval * scale));
  std::vector<double> xs;
  if (k_hi < k_lo) return xs;
  xs.reserve(static_cast<std::size_t>(k_hi - k_lo + 1));
  for (long long k = k_lo; k <= k_hi; ++k) xs.push_back(std::ldexp(static_cast<double>(k), -frac_bits));
  return xs;
}

double fit_objective(std::span<const std::int64_t> coeffs, double interval,
                     int frac_bits, const std::function<double(double)>& target) {
  const double scale = std::ldexp(1.0, frac_bits);
  long double total = 0;
  for (double x : quantized_domain(interval, frac_bits)) {
    long double bx = 0;
    for (std::size_t k = coeffs.size(); k-- > 0;) bx = bx * x + static_cast<long double>(coeffs[k]);
    long double r = bx - static_cast<long double>(scale * target(x));
    total += r * r;
  }
  return static_cast<double>(total);
}

FitResult fit_fixed_point_poly(int degree, double interval, int frac_bits,
                               const std::function<double(double)>& target) {
  if (degree < 1) throw Error("fit: degree must be >= 1");
  if (!(interval > 0)) throw Error("fit: interval bound must be positive");
  if (frac_bits < 1 || frac_bits > 30) throw Error("fit: frac_bits must be in [1, 30]");

  const auto xs = quantized_domain(interval, frac_bits);
  if (xs.size() < static_cast<std::size_t>(degree + 1)) {
    throw Error("fit: quantized domain has " + std::to_string(xs.size()) +
                " points, need at least " + std::to_string(degree + 1));
  }
  const double scale = std::ldexp(1.0, frac_bits);
  std::vector<double> ys(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = scale * target(xs[i]);

  // Unconstrained real least squares.
  const int n = degree + 1;
  Eigen::MatrixXd vander(static_cast<Eigen::Index>(xs.size()), n);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(xs.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double p = 1.0;
    for (int k = 0; k < n; ++k) {
      vander(static_cast<Eigen::Index>(i), k) = p;
      p *= xs[i];
    }
    rhs(static_cast<Eigen::Index>(i)) = ys[i];
  }
  Eigen::VectorXd real_sol = vander.colPivHouseholderQr().solve(rhs);

  FixedPointPoly poly;
  poly.frac_bits = frac_bits;
  poly.interval = interval;
  poly.int_coeffs.resize(n);
  const auto lo = poly.min_coeff();
  const auto hi = poly.max_coeff();
  for (int k = 0; k < n; ++k) {
    // nearbyint honours the default round-half-to-even mode.
    double r = std::nearbyint(real_sol(k));
    poly.int_coeffs[k] = std::clamp(static_cast<std::int64_t>(r), lo, hi);
  }

  const NormalForm nf = build_normal_form(xs, ys, degree);
  neighborhood_descent(nf, poly.int_coeffs, lo, hi);

  FitResult result;
  result.poly = poly;
  const auto coeffs = poly.real_coeffs();
  double max_err = 0.0;
  long double sse = 0;
  for (double x : xs) {
    double e = eval_real_poly(coeffs, x) - target(x);
    max_err = std::max(max_err, std::fabs(e));
    sse += static_cast<long double>(e) * e;
  }
  result.report.max_abs_error = max_err;
  result.report.sum_sq_error = static_cast<double>(sse);
  result.report.objective = static_cast<double>(nf.value(poly.int_coeffs));
  // Coefficients below solver noise count as genuinely zero.
  const double noise = 1e-9 * (1.0 + real_sol.cwiseAbs().maxCoeff());
  for (int k = 0; k < n; ++k) {
    if (poly.int_coeffs[k] == 0 && std::fabs(real_sol(k)) > noise) {
      result.report.truncated_terms.push_back(k);
    }
  }
  return result;
}

FitResult fit_relu_poly(int degree, double interval, int frac_bits) {
  return fit_fixed_point_poly(degree, interval, frac_bits,
                              [](double x) { return x > 0 ? x : 0.0; });
}

}  // namespace polyhe
