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
#include <vector>

namespace polyhe {

using Point = std::vector<double>;

/// Centroids in R^M and the nearest-centroid assignment of every input point.
struct Codebook {
  std::vector<Point> centroids;
  std::vector<std::size_t> assignment;
  double distortion = 0.0;  // sum of squared distances to assigned centroids
  /// Distortion after every assignment step of the kept restart.
  std::vector<double> history;
  std::size_t iterations = 0;

  std::size_t size() const { return centroids.size(); }
};

struct KMeansOptions {
  std::size_t max_iterations = 300;
  std::size_t restarts = 10;  // independent k-means++ seedings, best kept
  /// When the distinct points have at most this many k-subsets, Lloyd runs
  /// from every subset instead of from random seedings.
  std::size_t exhaustive_seedings = 256;
};

double squared_distance(const Point& a, const Point& b);

/// Lloyd iterations from k-means++ seedings (or from every k-subset of the
/// distinct points on small inputs), deterministic in `seed`.
/// Returns min(k, distinct points) centroids; centroids are sorted
/// lexicographically. Throws Error on empty input, k = 0 or ragged points.
Codebook kmeans(const std::vector<Point>& points, std::size_t k, std::uint64_t seed,
                const KMeansOptions& options = {});

/// Scalar convenience wrapper.
Codebook kmeans_1d(const std::vector<double>& values, std::size_t k, std::uint64_t seed,
                   const KMeansOptions& options = {});

}  // namespace polyhe
