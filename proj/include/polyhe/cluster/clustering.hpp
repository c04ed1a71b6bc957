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
#include <utility>
#include <vector>

#include "json.hpp"
#include "polyhe/cluster/kmeans.hpp"
#include "polyhe/graph/graph.hpp"

namespace polyhe {

enum class ClusterMode { kFull, kSlice, kEnsemble };

const char* cluster_mode_name(ClusterMode mode);
ClusterMode parse_cluster_mode(const std::string& name);

/// Kernel column s (0-based) of the l-th convolution in topological order
/// (1-based), i.e. every weight W[o, i, h, s].
struct SliceKey {
  std::size_t layer = 1;
  int node_id = -1;
  std::size_t column = 0;
};

struct SliceStats {
  SliceKey key;
  std::size_t weights = 0;      // points in the slice
  std::size_t codebook = 0;     // centroids fitted for the slice (0 for full mode)
  std::size_t encodings = 0;    // distinct centroids used within the slice
  double distortion = 0.0;
};

struct ClusterReport {
  ClusterMode mode = ClusterMode::kSlice;
  std::size_t k = 0;
  std::size_t models = 1;
  double distortion = 0.0;
  std::size_t encodings = 0;  // sum over slices of distinct centroids used
  /// Ensemble mode: sum over slices of min(k^M, slice size), the count for
  /// clustering every model independently.
  std::size_t independent_encodings = 0;
  std::vector<SliceStats> slices;
};

nlohmann::json to_json(const ClusterReport& report);

/// Convolution node ids in topological order.
std::vector<int> conv_layers(const ModelGraph& g);

/// Seed of a slice's codebook, mixed from the run seed, layer and column.
std::uint64_t slice_seed(std::uint64_t seed, std::size_t layer, std::size_t column);

/// One global scalar codebook over every convolution weight.
std::pair<ModelGraph, ClusterReport> full_cluster(const ModelGraph& g, std::size_t k,
                                                  std::uint64_t seed);

/// An independent scalar codebook per slice.
std::pair<ModelGraph, ClusterReport> slice_cluster(const ModelGraph& g, std::size_t k,
                                                   std::uint64_t seed);

/// A shared codebook in R^M per slice whose rows are one weight position
/// across the M models. Throws ValidationError when topologies differ.
std::pair<std::vector<ModelGraph>, ClusterReport> ensemble_slice_cluster(
    const std::vector<ModelGraph>& models, std::size_t k, std::uint64_t seed);

}  // namespace polyhe
