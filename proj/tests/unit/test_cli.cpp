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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "polyhe/cli/pipeline.hpp"
#include "polyhe/errors.hpp"
#include "polyhe/graph/model_io.hpp"
#include "polyhe/graph/resnet.hpp"

using namespace polyhe;
namespace fs = std::filesystem;

namespace {

ModelGraph small_rn20(std::uint64_t seed) {
  ResNetOptions o;
  o.variant = ResNetVariant::kRN20;
  o.width = 2;
  o.input = {3, 4, 4};
  o.seed = seed;
  return build_resnet_graph(o);
}

}  // namespace

TEST(TensorFile, RoundTripIsBitExact) {
  Tensor t({2, 3, 4});
  for (std::size_t k = 0; k < t.data.size(); ++k) t.data[k] = 1.0 / (1.0 + static_cast<double>(k)) - 0.2;
  const auto path = fs::temp_directory_path() / "polyhe_tensor_roundtrip.f64";
  write_tensor_file(t, path);
  const auto back = read_tensor_file(path);
  EXPECT_EQ(back.shape, t.shape);
  EXPECT_EQ(back.data, t.data);
  fs::remove(path);
}

TEST(TensorFile, MalformedInputIsRejected) {
  EXPECT_THROW(parse_tensor_bytes("no header"), ParseError);
  EXPECT_THROW(parse_tensor_bytes("{\"shape\": [1, 1, 1]}\n1234"), ParseError);
  EXPECT_THROW(parse_tensor_bytes("{\"shape\": [1, 1]}\n12345678"), ParseError);
  EXPECT_THROW(parse_tensor_bytes("{\"dtype\": \"<f4\", \"shape\": [1, 1, 1]}\n1234"), ParseError);
  EXPECT_THROW(parse_tensor_bytes("{oops\n12345678"), ParseError);
  EXPECT_NO_THROW(parse_tensor_bytes("{\"shape\": [1, 1, 1]}\n12345678"));
}

TEST(PipelineConfig, JsonRoundTripAndDefaults) {
  PipelineConfig c;
  EXPECT_EQ(c.strategy, Strategy::kP2FR);
  c.k = 7;
  c.members = 2;
  c.seed = 11;
  c.preset = "rn20";
  c.strategy = Strategy::kP2FRT;
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(back.k, 7u);
  EXPECT_EQ(back.members, 2u);
  EXPECT_EQ(back.seed, 11u);
  EXPECT_EQ(back.preset, "rn20");
  EXPECT_EQ(back.strategy, Strategy::kP2FRT);
  EXPECT_NO_THROW(back.validate());
}

TEST(PipelineConfig, ValidationNamesTheProblem) {
  PipelineConfig c;
  c.models = {"/nonexistent/model.json"};
  EXPECT_THROW(c.validate(), ValidationError);
  c.models.clear();
  c.k = 0;
  EXPECT_THROW(c.validate(), ValidationError);
  c.k = 4;
  c.preset = "rn20";
  c.strategy = Strategy::kP2;
  EXPECT_THROW(c.validate(), ValidationError);
}

TEST(Compare, PassesOnGeneratedModel) {
  PipelineConfig c;
  c.samples = 2;
  const auto r = compare_model(small_rn20(1), c);
  ASSERT_EQ(r.checks.size(), 4u);
  EXPECT_TRUE(r.passed()) << to_json(r).dump(2);
  EXPECT_EQ(r.first_failure(), "");
  EXPECT_EQ(r.checks[2].value, r.checks[2].tolerance);
}

TEST(Compare, CorruptedFusionNamesEquivalenceCheck) {
  PipelineConfig c;
  c.samples = 2;
  const auto r = compare_model(small_rn20(1), c, true);
  EXPECT_FALSE(r.passed());
  EXPECT_EQ(r.first_failure(), "transform-equivalence");
  EXPECT_EQ(to_json(r).at("first_failure"), "transform-equivalence");
}

TEST(Compare, EveryStrategyPasses) {
  for (Strategy s : all_strategies()) {
    PipelineConfig c;
    c.samples = 1;
    c.strategy = s;
    ResNetOptions o;
    o.variant = ResNetVariant::kRN20;
    o.width = 2;
    o.input = {3, 4, 4};
    o.act_degree = s == Strategy::kP4 ? 4 : 2;
    const auto r = compare_model(build_resnet_graph(o), c);
    EXPECT_TRUE(r.passed()) << to_string(s) << " " << r.first_failure();
  }
}
