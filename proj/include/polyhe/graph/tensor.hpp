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

#include <cstddef>
#include <string>
#include <vector>

#include "polyhe/errors.hpp"

namespace polyhe {

/// Channel-major (CHW) activation shape.
struct TensorShape {
  std::size_t channels = 1;
  std::size_t height = 1;
  std::size_t width = 1;

  std::size_t size() const { return channels * height * width; }
  bool operator==(const TensorShape&) const = default;
  std::string str() const {
    return "(" + std::to_string(channels) + "," + std::to_string(height) + "," +
           std::to_string(width) + ")";
  }
};

/// Dense real tensor in CHW order.
struct Tensor {
  TensorShape shape;
  std::vector<double> data;

  Tensor() = default;
  explicit Tensor(TensorShape s) : shape(s), data(s.size(), 0.0) {}
  Tensor(TensorShape s, std::vector<double> values)
      : shape(s), data(std::move(values)) {
    if (data.size() != shape.size()) {
      throw ShapeError("tensor data length " + std::to_string(data.size()) +
                       " does not match shape " + shape.str());
    }
  }

  double& at(std::size_t c, std::size_t h, std::size_t w) {
    return data[(c * shape.height + h) * shape.width + w];
  }
  double at(std::size_t c, std::size_t h, std::size_t w) const {
    return data[(c * shape.height + h) * shape.width + w];
  }
};

}  // namespace polyhe
