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

#include "polyhe/sim/probe.hpp"

#include <cmath>
#include <random>

#include "polyhe/graph/reference.hpp"
#include "polyhe/sim/executor.hpp"
#include "polyhe/sim/planner.hpp"
#include "polyhe/transform/equivalence.hpp"

namespace polyhe {

ModelGraph probe_graph(int depth, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> w(0.5, 0.8), c(0.1, 0.3);
  ModelGraph g;
  int x = g.add_node(InputNode{{1, 4, 4}});
  for (int d = 0; d < depth; ++d) {
    x = g.add_node(ConvNode{1, 1, 1, 1, 1, 0, {w(rng)}, {c(rng)}}, {x});
    x = g.add_node(PolyActNode::shared({c(rng), c(rng), 1.0}), {x});
  }
  x = g.add_node(AvgPoolNode{16, 1.0 / 16.0}, {x});
  x = g.add_node(LinearNode{1, 1, {w(rng)}, {c(rng)}}, {x});
  g.add_node(OutputNode{}, {x});
  return g;
}

ProbePoint rescale_error_probe(const CircuitProgram& prog, const Tensor& input,
                               const std::vector<double>& reference, double deviation) {
  RunOptions opts;
  opts.moduli = perturbed_moduli(prog.chain, deviation);
  const auto run = run_circuit(prog, input, opts);
  ProbePoint p;
  p.deviation = deviation;
  p.log_ratio = std::fabs(std::log1p(deviation));
  p.rescales = prog.levels_used;
  p.max_rel_error = relative_error(reference, run.member_outputs[0]);
  return p;
}

std::vector<ProbePoint> rescale_error_sweep(int depth, const std::vector<double>& deviations, int log2_delta,
                                            int sublevels, std::uint64_t seed) {
  const auto g = probe_graph(depth, seed);
  CompileOptions opts;
  opts.log2_delta = log2_delta;
  opts.sublevels = sublevels;
  const auto prog = compile_circuit({g}, opts);
  const auto input = random_inputs(g, 1, seed + 1)[0];
  Tensor x = input;
  for (double& v : x.data) v = 0.5 + 0.5 * std::fabs(v);
  const auto ref = reference_eval(g, x);
  std::vector<ProbePoint> out;
  for (double d : deviations) out.push_back(rescale_error_probe(prog, x, ref, d));
  return out;
}

}  // namespace polyhe
