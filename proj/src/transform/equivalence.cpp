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

#include "polyhe/transform/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "polyhe/errors.hpp"
#include "polyhe/graph/reference.hpp"

namespace polyhe {

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ShapeError("relative_error: length mismatch");
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::fabs(a[i] - b[i]));
    norm = std::max(norm, std::fabs(a[i]));
  }
  return norm > 0 ? diff / norm : diff;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

std::vector<Tensor> random_inputs(const ModelGraph& g, std::size_t count, std::uint64_t seed,
                                  double range) {
  const auto shape = g.node(g.input_id()).as<InputNode>().shape;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-range, range);
  std::vector<Tensor> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Tensor t(shape);
    for (double& v : t.data) v = u(rng);
    out.push_back(std::move(t));
  }
  return out;
}

EquivalenceReport check_equivalence(const ModelGraph& a, const ModelGraph& b,
                                    const std::vector<Tensor>& inputs) {
  EquivalenceReport r;
  for (const auto& x : inputs) {
    auto ya = reference_eval(a, x);
    auto yb = reference_eval(b, x);
    r.max_rel_error = std::max(r.max_rel_error, relative_error(ya, yb));
    for (std::size_t i = 0; i < ya.size(); ++i) {
      r.max_abs_error = std::max(r.max_abs_error, std::fabs(ya[i] - yb[i]));
    }
    r.argmax_mismatches += argmax(ya) != argmax(yb);
    ++r.samples;
  }
  return r;
}

}  // namespace polyhe
