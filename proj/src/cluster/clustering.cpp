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

#include "polyhe/cluster/clustering.hpp"

#include <set>

#include "polyhe/errors.hpp"

namespace polyhe {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Flat weight indices of slice `column`.
std::vector<std::size_t> slice_indices(const ConvNode& conv, std::size_t column) {
  std::vector<std::size_t> idx;
  for (std::size_t o = 0; o < conv.out_channels; ++o)
    for (std::size_t i = 0; i < conv.in_channels; ++i)
      for (std::size_t h = 0; h < conv.kernel_h; ++h) idx.push_back(conv.weight_index(o, i, h, column));
  return idx;
}

std::vector<int> checked_conv_layers(const ModelGraph& g) {
  auto layers = conv_layers(g);
  if (layers.empty()) throw ValidationError("clustering needs at least one convolution");
  return layers;
}

void tally(ClusterReport& r) {
  r.distortion = 0.0;
  r.encodings = 0;
  for (const auto& s : r.slices) {
    r.distortion += s.distortion;
    r.encodings += s.encodings;
  }
}

bool same_topology(const ModelGraph& a, const ModelGraph& b) {
  if (a.size() != b.size()) return false;
  for (const auto& [id, node] : a.nodes()) {
    if (!b.contains(id)) return false;
    const auto& other = b.node(id);
    if (other.kind() != node.kind() || other.inputs != node.inputs) return false;
    if (node.kind() == NodeKind::kConv) {
      const auto& x = node.as<ConvNode>();
      const auto& y = other.as<ConvNode>();
      if (x.out_channels != y.out_channels || x.in_channels != y.in_channels ||
          x.kernel_h != y.kernel_h || x.kernel_w != y.kernel_w)
        return false;
    }
  }
  return true;
}

}  // namespace

const char* cluster_mode_name(ClusterMode mode) {
  switch (mode) {
    case ClusterMode::kFull: return "full";
    case ClusterMode::kSlice: return "slice";
    case ClusterMode::kEnsemble: return "ensemble";
  }
  return "?";
}

ClusterMode parse_cluster_mode(const std::string& name) {
  for (auto m : {ClusterMode::kFull, ClusterMode::kSlice, ClusterMode::kEnsemble}) {
    if (name == cluster_mode_name(m)) return m;
  }
  throw Error("unknown cluster mode '" + name + "'");
}

nlohmann::json to_json(const ClusterReport& r) {
  nlohmann::json slices = nlohmann::json::array();
  for (const auto& s : r.slices) {
    slices.push_back({{"layer", s.key.layer},
                      {"node", s.key.node_id},
                      {"column", s.key.column},
                      {"weights", s.weights},
                      {"codebook", s.codebook},
                      {"encodings", s.encodings},
                      {"distortion", s.distortion}});
  }
  nlohmann::json j{{"mode", cluster_mode_name(r.mode)},
                   {"k", r.k},
                   {"models", r.models},
                   {"distortion", r.distortion},
                   {"encodings", r.encodings},
                   {"slices", slices}};
  if (r.mode == ClusterMode::kEnsemble) j["independent_encodings"] = r.independent_encodings;
  return j;
}

std::vector<int> conv_layers(const ModelGraph& g) {
  std::vector<int> out;
  for (int id : g.topological_order()) {
    if (g.node(id).kind() == NodeKind::kConv) out.push_back(id);
  }
  return out;
}

std::uint64_t slice_seed(std::uint64_t seed, std::size_t layer, std::size_t column) {
  return splitmix(splitmix(splitmix(seed) ^ layer) ^ column);
}

std::pair<ModelGraph, ClusterReport> full_cluster(const ModelGraph& g, std::size_t k,
                                                  std::uint64_t seed) {
  const auto layers = checked_conv_layers(g);
  std::vector<double> all;
  for (int id : layers) {
    const auto& w = g.node(id).as<ConvNode>().weights;
    all.insert(all.end(), w.begin(), w.end());
  }
  const auto cb = kmeans_1d(all, k, seed);

  ModelGraph out = g;
  ClusterReport r;
  r.mode = ClusterMode::kFull;
  r.k = k;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    auto& conv = out.mutable_node(layers[l]).as<ConvNode>();
    const std::size_t base = offset;
    for (std::size_t s = 0; s < conv.kernel_w; ++s) {
      SliceStats st;
      st.key = {l + 1, layers[l], s};
      std::set<std::size_t> used;
      for (std::size_t idx : slice_indices(conv, s)) {
        const std::size_t a = cb.assignment[base + idx];
        const double c = cb.centroids[a][0];
        st.distortion += (conv.weights[idx] - c) * (conv.weights[idx] - c);
        conv.weights[idx] = c;
        used.insert(a);
        ++st.weights;
      }
      st.encodings = used.size();
      r.slices.push_back(st);
    }
    offset += conv.weights.size();
  }
  tally(r);
  return {std::move(out), r};
}

std::pair<ModelGraph, ClusterReport> slice_cluster(const ModelGraph& g, std::size_t k,
                                                   std::uint64_t seed) {
  auto [models, report] = ensemble_slice_cluster({g}, k, seed);
  report.mode = ClusterMode::kSlice;
  return {std::move(models[0]), report};
}

std::pair<std::vector<ModelGraph>, ClusterReport> ensemble_slice_cluster(
    const std::vector<ModelGraph>& models, std::size_t k, std::uint64_t seed) {
  if (models.empty()) throw ValidationError("ensemble clustering needs at least one model");
  const auto layers = checked_conv_layers(models[0]);
  for (std::size_t m = 1; m < models.size(); ++m) {
    if (!same_topology(models[0], models[m]))
      throw ValidationError("ensemble member " + std::to_string(m) + " differs in topology");
  }
  const std::size_t M = models.size();

  std::vector<ModelGraph> out = models;
  ClusterReport r;
  r.mode = ClusterMode::kEnsemble;
  r.k = k;
  r.models = M;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& proto = models[0].node(layers[l]).as<ConvNode>();
    for (std::size_t s = 0; s < proto.kernel_w; ++s) {
      const auto idx = slice_indices(proto, s);
      std::vector<Point> rows;
      rows.reserve(idx.size());
      for (std::size_t j : idx) {
        Point row(M);
        for (std::size_t m = 0; m < M; ++m) row[m] = models[m].node(layers[l]).as<ConvNode>().weights[j];
        rows.push_back(std::move(row));
      }
      const auto cb = kmeans(rows, k, slice_seed(seed, l + 1, s));

      SliceStats st;
      st.key = {l + 1, layers[l], s};
      st.weights = idx.size();
      st.codebook = cb.size();
      std::set<std::size_t> used(cb.assignment.begin(), cb.assignment.end());
      st.encodings = used.size();
      for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto& c = cb.centroids[cb.assignment[j]];
        st.distortion += squared_distance(rows[j], c);
        for (std::size_t m = 0; m < M; ++m) {
          out[m].mutable_node(layers[l]).as<ConvNode>().weights[idx[j]] = c[m];
        }
      }
      r.slices.push_back(st);

      double independent = 1.0;
      for (std::size_t m = 0; m < M; ++m) independent *= static_cast<double>(k);
      r.independent_encodings += static_cast<std::size_t>(
          std::min(independent, static_cast<double>(idx.size())));
    }
  }
  tally(r);
  return {std::move(out), r};
}

}  // namespace polyhe
