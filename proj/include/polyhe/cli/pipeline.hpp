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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polyhe/graph/graph.hpp"
#include "polyhe/graph/tensor.hpp"
#include "polyhe/levels/level_analysis.hpp"

namespace polyhe {

/// Settings shared by the subcommands. Loaded from a JSON config file and
/// overridden by flags.
struct PipelineConfig {
  std::vector<std::filesystem::path> models;
  std::optional<std::filesystem::path> plan;
  std::optional<std::filesystem::path> input;
  Strategy strategy = Strategy::kP2FR;
  std::size_t k = 16;
  std::size_t members = 1;
  int log2_delta = 40;
  std::string preset;
  std::uint64_t seed = 0;
  std::size_t samples = 8;
  double equivalence_tol = 1e-8;
  double simulation_tol = 1e-6;

  /// Throws ValidationError when a referenced file is missing, the strategy
  /// is not a P2 form for a preset, or a count is zero.
  void validate() const;
};

PipelineConfig config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineConfig& cfg);

/// Tensor file: one line of JSON header {"dtype": "<f8", "shape": [c, h, w]}
/// followed by the raw little-endian float64 values.
Tensor read_tensor_file(const std::filesystem::path& path);
void write_tensor_file(const Tensor& t, const std::filesystem::path& path);
Tensor parse_tensor_bytes(const std::string& bytes);
std::string tensor_bytes(const Tensor& t);

struct CheckResult {
  std::string name;
  bool passed = false;
  double value = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CompareReport {
  std::vector<CheckResult> checks;
  bool passed() const;
  /// Name of the first failing check, empty when all pass.
  std::string first_failure() const;
};

nlohmann::json to_json(const CompareReport& r);

/// Sublevels used for a strategy: 2 with tower reuse, 1 otherwise.
int strategy_sublevels(Strategy s);

/// Runs the strategy's pipeline on `g` and checks, in order:
///   transform-equivalence  reference_eval before and after the rewrite
///   strategy-form          node forms match the strategy
///   level-table            simulator rescale count equals analyze_levels
///   simulation-fidelity    exact-mode simulated logits vs reference_eval
/// With `corrupt_fused` a coefficient of the first convolution is perturbed
/// after the rewrite.
CompareReport compare_model(const ModelGraph& g, const PipelineConfig& cfg, bool corrupt_fused = false);

}  // namespace polyhe
