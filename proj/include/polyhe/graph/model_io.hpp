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
#include <string>

#include "polyhe/graph/graph.hpp"

namespace polyhe {

enum class WeightStorage {
  kEmbedded,  // base64 of little-endian float64 inside the JSON document
  kSidecar,   // raw little-endian float64 file next to the JSON document
};

/// Parses a model document. `base_dir` resolves sidecar weight files.
/// Throws ParseError on malformed input and ValidationError when the graph
/// breaks an invariant.
ModelGraph parse_model(const std::string& text, const std::filesystem::path& base_dir = {});
ModelGraph load_model(const std::filesystem::path& path);

std::string serialize_model(const ModelGraph& g);
/// Writes the model; with kSidecar the weights go to `<stem>.bin`.
void save_model(const ModelGraph& g, const std::filesystem::path& path,
                WeightStorage storage = WeightStorage::kEmbedded);

std::string base64_encode(const std::string& bytes);
std::string base64_decode(const std::string& text);

}  // namespace polyhe
