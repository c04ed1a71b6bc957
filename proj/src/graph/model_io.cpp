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

#include "polyhe/graph/model_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <sodium.h>

#include "json.hpp"
#include "polyhe/errors.hpp"

namespace polyhe {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    std::uint64_t r = 0;
    for (int i = 0; i < 8; ++i) r |= ((v >> (8 * i)) & 0xff) << (8 * (7 - i));
    return r;
  }
  return v;
}

class WeightWriter {
 public:
  json put(const std::vector<double>& values) {
    json ref = {buffer_.size(), values.size()};
    buffer_.insert(buffer_.end(), values.begin(), values.end());
    return ref;
  }
  json put(double v) { return put(std::vector<double>{v}); }

  std::string bytes() const {
    std::string out(buffer_.size() * 8, '\0');
    for (std::size_t i = 0; i < buffer_.size(); ++i) {
      auto bits = to_little_endian(std::bit_cast<std::uint64_t>(buffer_[i]));
      std::memcpy(out.data() + 8 * i, &bits, 8);
    }
    return out;
  }

 private:
  std::vector<double> buffer_;
};

class WeightReader {
 public:
  explicit WeightReader(const std::string& bytes) {
    if (bytes.size() % 8 != 0) throw ParseError("weight buffer length is not a multiple of 8");
    buffer_.resize(bytes.size() / 8);
    for (std::size_t i = 0; i < buffer_.size(); ++i) {
      std::uint64_t bits;
      std::memcpy(&bits, bytes.data() + 8 * i, 8);
      buffer_[i] = std::bit_cast<double>(to_little_endian(bits));
    }
  }

  std::vector<double> get(const json& ref, int id, const char* name) const {
    if (!ref.is_array() || ref.size() != 2) {
      throw ParseError("node " + std::to_string(id) + ": weight_ref." + name +
                       " must be [offset, count]");
    }
    auto offset = ref[0].get<std::size_t>();
    auto count = ref[1].get<std::size_t>();
    if (offset + count > buffer_.size() || offset + count < offset) {
      throw ParseError("node " + std::to_string(id) + ": weight_ref." + name +
                       " exceeds the weight buffer");
    }
    return {buffer_.begin() + static_cast<std::ptrdiff_t>(offset),
            buffer_.begin() + static_cast<std::ptrdiff_t>(offset + count)};
  }
  double scalar(const json& ref, int id, const char* name) const {
    auto v = get(ref, id, name);
    if (v.size() != 1) {
      throw ParseError("node " + std::to_string(id) + ": " + name + " must be a scalar");
    }
    return v[0];
  }

 private:
  std::vector<double> buffer_;
};

json node_to_json(const Node& n, WeightWriter& w) {
  json j = {{"id", n.id}, {"kind", to_string(n.kind())}};
  json ref = json::object();
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, InputNode>) {
          j["shape"] = {p.shape.channels, p.shape.height, p.shape.width};
        } else if constexpr (std::is_same_v<T, ConvNode>) {
          j["out_channels"] = p.out_channels;
          j["in_channels"] = p.in_channels;
          j["kernel"] = {p.kernel_h, p.kernel_w};
          j["stride"] = p.stride;
          j["padding"] = p.padding;
          ref["weights"] = w.put(p.weights);
          ref["bias"] = w.put(p.bias);
        } else if constexpr (std::is_same_v<T, BatchNormNode>) {
          j["channels"] = p.channels();
          ref["gamma"] = w.put(p.gamma);
          ref["beta"] = w.put(p.beta);
          ref["mean"] = w.put(p.mean);
          ref["std"] = w.put(p.stddev);
        } else if constexpr (std::is_same_v<T, PolyActNode>) {
          j["degree"] = p.degree();
          j["rows"] = p.rows();
          std::vector<double> flat;
          for (const auto& r : p.coeffs) flat.insert(flat.end(), r.begin(), r.end());
          ref["coeffs"] = w.put(flat);
        } else if constexpr (std::is_same_v<T, PolySkipNode>) {
          std::set<std::pair<int, int>> keys;
          for (const auto& r : p.coeffs) {
            for (const auto& [ij, v] : r) keys.insert(ij);
          }
          json terms = json::array();
          for (const auto& ij : keys) terms.push_back({ij.first, ij.second});
          std::vector<double> values;
          for (std::size_t c = 0; c < p.rows(); ++c) {
            for (const auto& ij : keys) values.push_back(p.coeff(c, ij.first, ij.second));
          }
          j["terms"] = terms;
          j["rows"] = p.rows();
          ref["coeffs"] = w.put(values);
        } else if constexpr (std::is_same_v<T, AvgPoolNode>) {
          j["kernel"] = p.kernel;
          ref["divisor"] = w.put(p.scale);
        } else if constexpr (std::is_same_v<T, AddNode>) {
          ref["weight_x"] = w.put(p.weight_x);
          ref["weight_y"] = w.put(p.weight_y);
        } else if constexpr (std::is_same_v<T, LinearNode>) {
          j["in_features"] = p.in_features;
          j["out_features"] = p.out_features;
          ref["weights"] = w.put(p.weights);
          ref["bias"] = w.put(p.bias);
        }
      },
      n.payload);
  if (!ref.empty()) j["weight_ref"] = ref;
  return j;
}

const json& field(const json& j, const char* key, int id) {
  if (!j.contains(key)) {
    throw ParseError("node " + std::to_string(id) + ": missing field '" + key + "'");
  }
  return j.at(key);
}

NodePayload node_from_json(const json& j, int id, const WeightReader& r) {
  const auto kind = node_kind_from_string(field(j, "kind", id).get<std::string>());
  const json empty = json::object();
  const json& ref = j.contains("weight_ref") ? j.at("weight_ref") : empty;
  auto vec = [&](const char* name) { return r.get(field(ref, name, id), id, name); };
  auto scalar = [&](const char* name) { return r.scalar(field(ref, name, id), id, name); };
  auto count = [&](const char* name) { return field(j, name, id).get<std::size_t>(); };

  switch (kind) {
    case NodeKind::kInput: {
      auto s = field(j, "shape", id).get<std::vector<std::size_t>>();
      if (s.size() != 3) throw ParseError("node " + std::to_string(id) + ": shape must be [c, h, w]");
      return InputNode{{s[0], s[1], s[2]}};
    }
    case NodeKind::kConv: {
      ConvNode c;
      c.out_channels = count("out_channels");
      c.in_channels = count("in_channels");
      auto k = field(j, "kernel", id).get<std::vector<std::size_t>>();
      if (k.size() != 2) throw ParseError("node " + std::to_string(id) + ": kernel must be [kh, kw]");
      c.kernel_h = k[0];
      c.kernel_w = k[1];
      c.stride = count("stride");
      c.padding = count("padding");
      c.weights = vec("weights");
      c.bias = vec("bias");
      return c;
    }
    case NodeKind::kBatchNorm:
      return BatchNormNode{vec("gamma"), vec("beta"), vec("mean"), vec("std")};
    case NodeKind::kPolyAct: {
      const std::size_t rows = j.value("rows", std::size_t{1});
      const std::size_t width = count("degree") + 1;
      auto values = vec("coeffs");
      if (rows == 0 || values.size() != rows * width) {
        throw ParseError("node " + std::to_string(id) + ": coeffs length does not match rows x (degree + 1)");
      }
      PolyActNode a;
      for (std::size_t r = 0; r < rows; ++r) {
        a.coeffs.emplace_back(values.begin() + static_cast<std::ptrdiff_t>(r * width),
                              values.begin() + static_cast<std::ptrdiff_t>((r + 1) * width));
      }
      return a;
    }
    case NodeKind::kPolySkip: {
      const std::size_t rows = j.value("rows", std::size_t{1});
      auto terms = field(j, "terms", id);
      auto values = vec("coeffs");
      if (!terms.is_array() || rows == 0 || terms.size() * rows != values.size()) {
        throw ParseError("node " + std::to_string(id) + ": coeffs length does not match rows x terms");
      }
      PolySkipNode s;
      s.coeffs.resize(rows);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t t = 0; t < terms.size(); ++t) {
          auto ij = terms[t].get<std::vector<int>>();
          if (ij.size() != 2) throw ParseError("node " + std::to_string(id) + ": term must be [i, j]");
          s.coeffs[r][{ij[0], ij[1]}] = values[r * terms.size() + t];
        }
      }
      return s;
    }
    case NodeKind::kAvgPool:
      return AvgPoolNode{count("kernel"), scalar("divisor")};
    case NodeKind::kAdd:
      return AddNode{vec("weight_x"), vec("weight_y")};
    case NodeKind::kLinear: {
      LinearNode l;
      l.in_features = count("in_features");
      l.out_features = count("out_features");
      l.weights = vec("weights");
      l.bias = vec("bias");
      return l;
    }
    case NodeKind::kOutput:
      return OutputNode{};
  }
  throw ParseError("unreachable node kind");
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json build_document(const ModelGraph& g, WeightWriter& w) {
  json doc;
  doc["version"] = kFormatVersion;
  doc["nodes"] = json::array();
  doc["edges"] = json::array();
  for (const auto& [id, n] : g.nodes()) {
    doc["nodes"].push_back(node_to_json(n, w));
  }
  // Edges are listed per consumer in input order, which fixes the branch
  // order of two-input nodes.
  for (const auto& [id, n] : g.nodes()) {
    for (int in : n.inputs) doc["edges"].push_back({in, id});
  }
  return doc;
}

}  // namespace

std::string base64_encode(const std::string& bytes) {
  const int variant = sodium_base64_VARIANT_ORIGINAL;
  std::string out(sodium_base64_encoded_len(bytes.size(), variant), '\0');
  sodium_bin2base64(out.data(), out.size(), reinterpret_cast<const unsigned char*>(bytes.data()),
                    bytes.size(), variant);
  out.resize(out.size() - 1);  // trailing NUL
  return out;
}

std::string base64_decode(const std::string& text) {
  std::string out(text.size() / 4 * 3 + 3, '\0');
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(), text.data(),
                        text.size(), nullptr, &len, &end, sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw ParseError("invalid base64 data");
  }
  out.resize(len);
  return out;
}

ModelGraph parse_model(const std::string& text, const std::filesystem::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object()) throw ParseError("model document must be a JSON object");
    if (!doc.contains("version") || doc["version"].get<int>() != kFormatVersion) {
      throw ParseError("unsupported or missing model format version");
    }
    if (!doc.contains("nodes") || !doc.contains("edges") || !doc.contains("weights")) {
      throw ParseError("model document needs 'nodes', 'edges' and 'weights'");
    }
    const json& weights = doc["weights"];
    std::string bytes;
    if (weights.contains("data")) {
      bytes = base64_decode(weights["data"].get<std::string>());
    } else if (weights.contains("sidecar")) {
      bytes = read_file(base_dir / weights["sidecar"].get<std::string>());
    } else {
      throw ParseError("weights need 'data' or 'sidecar'");
    }
    WeightReader reader(bytes);

    std::map<int, std::vector<int>> inputs;
    for (const auto& e : doc["edges"]) {
      auto pair = e.get<std::vector<int>>();
      if (pair.size() != 2) throw ParseError("edge must be [src, dst]");
      inputs[pair[1]].push_back(pair[0]);
    }
    ModelGraph g;
    for (const auto& jn : doc["nodes"]) {
      int id = jn.at("id").get<int>();
      if (g.contains(id)) throw ValidationError("duplicate node id", id);
      g.insert_node(id, node_from_json(jn, id, reader), inputs[id]);
      inputs.erase(id);
    }
    if (!inputs.empty()) throw ValidationError("edge targets unknown node", inputs.begin()->first);
    g.validate();
    return g;
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed model document: ") + e.what());
  }
}

ModelGraph load_model(const std::filesystem::path& path) {
  return parse_model(read_file(path), path.parent_path());
}

std::string serialize_model(const ModelGraph& g) {
  WeightWriter w;
  json doc = build_document(g, w);
  doc["weights"] = {{"encoding", "base64-f64le"}, {"data", base64_encode(w.bytes())}};
  return doc.dump(1);
}

void save_model(const ModelGraph& g, const std::filesystem::path& path, WeightStorage storage) {
  std::string text;
  if (storage == WeightStorage::kEmbedded) {
    text = serialize_model(g);
  } else {
    WeightWriter w;
    json doc = build_document(g, w);
    auto sidecar = path.stem().string() + ".bin";
    doc["weights"] = {{"encoding", "f64le"}, {"sidecar", sidecar}};
    std::ofstream bin(path.parent_path() / sidecar, std::ios::binary);
    if (!bin) throw Error("cannot write " + (path.parent_path() / sidecar).string());
    auto bytes = w.bytes();
    bin.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    text = doc.dump(1);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text << '\n';
}

}  // namespace polyhe
