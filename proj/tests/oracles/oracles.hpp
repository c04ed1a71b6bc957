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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

namespace polyhe::oracle {

inline double relu(double x) { return x > 0 ? x : 0.0; }

/// ||BA - Y||^2 for ReLU on {k 2^-b} within [-c, c], from the definition.
inline long double relu_fit_objective(const std::vector<std::int64_t>& a, double c, int b) {
  const long double scale = std::ldexp(1.0L, b);
  long double total = 0;
  const long long kmax = static_cast<long long>(std::floor(c * std::ldexp(1.0, b)));
  for (long long k = -kmax; k <= kmax; ++k) {
    long double x = std::ldexp(static_cast<long double>(k), -b);
    long double bx = 0, p = 1;
    for (auto ak : a) {
      bx += ak * p;
      p *= x;
    }
    long double r = bx - scale * relu(static_cast<double>(x));
    total += r * r;
  }
  return total;
}

/// Real least squares through the normal equations and Gaussian elimination,
/// in 2^b-scaled units.
inline std::vector<long double> relu_real_lsq(int d, double c, int b) {
  const int n = d + 1;
  std::vector<std::vector<long double>> m(n, std::vector<long double>(n + 1, 0));
  const long long kmax = static_cast<long long>(std::floor(c * std::ldexp(1.0, b)));
  for (long long k = -kmax; k <= kmax; ++k) {
    long double x = std::ldexp(static_cast<long double>(k), -b);
    long double y = std::ldexp(1.0L, b) * relu(static_cast<double>(x));
    for (int r = 0; r < n; ++r) {
      for (int s = 0; s < n; ++s) m[r][s] += std::pow(x, r + s);
      m[r][n] += std::pow(x, r) * y;
    }
  }
  for (int col = 0; col < n; ++col) {
    for (int r = col + 1; r < n; ++r) {
      long double f = m[r][col] / m[col][col];
      for (int s = col; s <= n; ++s) m[r][s] -= f * m[col][s];
    }
  }
  std::vector<long double> sol(n);
  for (int r = n - 1; r >= 0; --r) {
    long double v = m[r][n];
    for (int s = r + 1; s < n; ++s) v -= m[r][s] * sol[s];
    sol[r] = v / m[r][r];
  }
  return sol;
}

/// Best integer quadratic within `radius` of the rounded real solution and
/// inside the coefficient box, by exhaustive search.
inline std::vector<std::int64_t> relu_quadratic_search(double c, int b, int radius = 6) {
  const auto sol = relu_real_lsq(2, c, b);
  const std::int64_t lo = -(std::int64_t{1} << (b - 1)), hi = (std::int64_t{1} << (b - 1)) - 1;
  std::vector<std::int64_t> best, cand(3);
  long double best_val = std::numeric_limits<long double>::infinity();
  for (int i = -radius; i <= radius; ++i) {
    for (int j = -radius; j <= radius; ++j) {
      for (int k = -radius; k <= radius; ++k) {
        cand[0] = std::llround(static_cast<double>(sol[0])) + i;
        cand[1] = std::llround(static_cast<double>(sol[1])) + j;
        cand[2] = std::llround(static_cast<double>(sol[2])) + k;
        if (std::any_of(cand.begin(), cand.end(), [&](auto v) { return v < lo || v > hi; })) continue;
        long double v = relu_fit_objective(cand, c, b);
        if (v < best_val) {
          best_val = v;
          best = cand;
        }
      }
    }
  }
  return best;
}

/// Minimum k-means distortion over every labelling of the points into at most
/// k groups, each group at its mean.
inline double kmeans_exhaustive_optimum(const std::vector<std::vector<double>>& pts, std::size_t k) {
  const std::size_t n = pts.size(), m = pts[0].size();
  std::vector<std::size_t> label(n, 0);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    std::vector<std::vector<double>> mean(k, std::vector<double>(m, 0.0));
    std::vector<double> count(k, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      count[label[i]] += 1;
      for (std::size_t j = 0; j < m; ++j) mean[label[i]][j] += pts[i][j];
    }
    double d = 0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < m; ++j) {
        double e = pts[i][j] - mean[label[i]][j] / count[label[i]];
        d += e * e;
      }
    }
    best = std::min(best, d);
    std::size_t pos = 0;
    while (pos < n && ++label[pos] == k) label[pos++] = 0;
    if (pos == n) break;
  }
  return best;
}

}  // namespace polyhe::oracle
