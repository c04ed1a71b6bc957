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

#include "polyhe/cluster/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <random>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

void hartigan(const std::vector<Point>& points, Codebook& cb);

std::size_t nearest(const Point& p, const std::vector<Point>& centroids, double* dist) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    double d = squared_distance(p, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

std::vector<Point> plus_plus_seed(const std::vector<Point>& points, std::size_t k,
                                  std::mt19937_64& rng) {
  std::vector<Point> centroids;
  std::uniform_int_distribution<std::size_t> first(0, points.size() - 1);
  centroids.push_back(points[first(rng)]);
  std::vector<double> d2(points.size());
  while (centroids.size() < k) {
    for (std::size_t i = 0; i < points.size(); ++i) nearest(points[i], centroids, &d2[i]);
    double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick;
    if (total <= 0.0) {
      pick = first(rng);
    } else {
      std::discrete_distribution<std::size_t> dist(d2.begin(), d2.end());
      pick = dist(rng);
    }
    centroids.push_back(points[pick]);
  }
  return centroids;
}

Codebook lloyd(const std::vector<Point>& points, std::vector<Point> centroids,
               std::size_t max_iterations) {
  const std::size_t n = points.size(), k = centroids.size(), m = points[0].size();
  Codebook cb;
  std::vector<std::size_t> assign(n, k);
  std::vector<double> dist(n);
  for (std::size_t it = 0; it < max_iterations; ++it) {
    bool changed = false;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t c = nearest(points[i], centroids, &dist[i]);
      changed |= c != assign[i];
      assign[i] = c;
      total += dist[i];
    }
    cb.history.push_back(total);
    cb.iterations = it + 1;
    if (!changed) break;

    std::vector<Point> sums(k, Point(m, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++counts[assign[i]];
      for (std::size_t j = 0; j < m; ++j) sums[assign[i]][j] += points[i][j];
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t j = 0; j < m; ++j) centroids[c][j] = sums[c][j] / static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < n; ++i) {
        double d = squared_distance(points[i], centroids[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      centroids[c] = points[far];
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
    }
  }
  cb.centroids = std::move(centroids);
  cb.assignment = std::move(assign);
  cb.distortion = cb.history.back();
  hartigan(points, cb);
  return cb;
}

double subset_count(std::size_t n, std::size_t k) {
  double c = 1.0;
  for (std::size_t i = 0; i < k; ++i) c = c * static_cast<double>(n - i) / static_cast<double>(i + 1);
  return c;
}

/// Hartigan refinement: moves single points between clusters while a move
/// lowers the distortion, then recomputes the means.
void hartigan(const std::vector<Point>& points, Codebook& cb) {
  const std::size_t n = points.size(), k = cb.centroids.size(), m = points[0].size();
  std::vector<double> count(k, 0.0);
  for (std::size_t a : cb.assignment) count[a] += 1.0;
  auto& mu = cb.centroids;
  bool moved = true;
  while (moved) {
    moved = false;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = cb.assignment[i];
      if (count[a] <= 1.0) continue;
      const double leave = count[a] / (count[a] - 1.0) * squared_distance(points[i], mu[a]);
      std::size_t best = a;
      double best_gain = 0.0;
      for (std::size_t b = 0; b < k; ++b) {
        if (b == a) continue;
        const double gain = leave - count[b] / (count[b] + 1.0) * squared_distance(points[i], mu[b]);
        if (gain > best_gain * (1.0 + 1e-12) + 1e-15) {
          best_gain = gain;
          best = b;
        }
      }
      if (best == a) continue;
      for (std::size_t j = 0; j < m; ++j) {
        mu[a][j] = (mu[a][j] * count[a] - points[i][j]) / (count[a] - 1.0);
        mu[best][j] = (mu[best][j] * count[best] + points[i][j]) / (count[best] + 1.0);
      }
      count[a] -= 1.0;
      count[best] += 1.0;
      cb.assignment[i] = best;
      moved = true;
    }
  }
  std::vector<Point> sums(k, Point(m, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) sums[cb.assignment[i]][j] += points[i][j];
  double total = 0.0;
  for (std::size_t c = 0; c < k; ++c)
    for (std::size_t j = 0; j < m; ++j) mu[c][j] = sums[c][j] / count[c];
  for (std::size_t i = 0; i < n; ++i) total += squared_distance(points[i], mu[cb.assignment[i]]);
  if (total < cb.distortion) cb.history.push_back(total);
  cb.distortion = cb.history.back();
}

void sort_centroids(Codebook& cb) {
  std::vector<std::size_t> order(cb.centroids.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return cb.centroids[a] < cb.centroids[b]; });
  std::vector<std::size_t> rank(order.size());
  std::vector<Point> sorted;
  for (std::size_t r = 0; r < order.size(); ++r) {
    rank[order[r]] = r;
    sorted.push_back(cb.centroids[order[r]]);
  }
  cb.centroids = std::move(sorted);
  for (auto& a : cb.assignment) a = rank[a];
}

}  // namespace

double squared_distance(const Point& a, const Point& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    double d = a[j] - b[j];
    s += d * d;
  }
  return s;
}

Codebook kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed,
                const KMeansOptions& options) {
  if (points.empty()) throw Error("kmeans: no points");
  if (k == 0) throw Error("kmeans: k must be at least 1");
  const std::size_t m = points[0].size();
  for (const auto& p : points) {
    if (p.size() != m || m == 0) throw Error("kmeans: points must share a nonzero dimension");
  }

  std::vector<Point> distinct = points;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  Codebook best;
  if (k >= distinct.size()) {
    best.centroids = distinct;
    best.assignment.resize(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
      best.assignment[i] = static_cast<std::size_t>(
          std::lower_bound(distinct.begin(), distinct.end(), points[i]) - distinct.begin());
    }
    best.history = {0.0};
    return best;
  }

  bool have = false;
  auto keep = [&](Codebook cb) {
    if (!have || cb.distortion < best.distortion) best = std::move(cb);
    have = true;
  };
  if (subset_count(distinct.size(), k) <= options.exhaustive_seedings) {
    std::vector<std::size_t> pick(k);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      std::vector<Point> init;
      for (std::size_t i : pick) init.push_back(distinct[i]);
      keep(lloyd(points, std::move(init), options.max_iterations));
      std::size_t pos = k;
      while (pos > 0 && pick[pos - 1] == distinct.size() - k + pos - 1) --pos;
      if (pos == 0) break;
      ++pick[pos - 1];
      for (std::size_t j = pos; j < k; ++j) pick[j] = pick[j - 1] + 1;
    }
  } else {
    std::mt19937_64 rng(seed);
    const std::size_t restarts = std::max<std::size_t>(1, options.restarts);
    for (std::size_t r = 0; r < restarts; ++r) {
      keep(lloyd(points, plus_plus_seed(distinct, k, rng), options.max_iterations));
    }
  }
  sort_centroids(best);
  return best;
}

Codebook kmeans_1d(const std::vector<double>& values, std::size_t k, std::uint64_t seed,
                   const KMeansOptions& options) {
  std::vector<Point> points;
  points.reserve(values.size());
  for (double v : values) points.push_back({v});
  return kmeans(points, k, seed, options);
}

}  // namespace polyhe
