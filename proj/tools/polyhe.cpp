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

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "polyhe/cli/pipeline.hpp"
#include "polyhe/cluster/clustering.hpp"
#include "polyhe/errors.hpp"
#include "polyhe/graph/model_io.hpp"
#include "polyhe/graph/resnet.hpp"
#include "polyhe/levels/modulus_chain.hpp"
#include "polyhe/poly/fixed_point_poly.hpp"
#include "polyhe/sim/executor.hpp"
#include "polyhe/sim/planner.hpp"
#include "polyhe/train/lemmas.hpp"
#include "polyhe/train/tiny_mlp.hpp"
#include "polyhe/transform/equivalence.hpp"
#include "polyhe/transform/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace polyhe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheck = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Reads a JSON config file: top-level keys set global flags, objects keyed
/// by a subcommand name set that subcommand's flags.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override { return "{}"; }

  std::vector<CLI::ConfigItem> from_config(std::istream& in) const override {
    json j;
    try {
      j = json::parse(in);
    } catch (const json::exception& e) {
      throw CLI::ConversionError(std::string("config: ") + e.what());
    }
    std::vector<CLI::ConfigItem> items;
    collect(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    return v.dump();
  }

  static void collect(const json& j, const std::vector<std::string>& parents,
                      std::vector<CLI::ConfigItem>& items) {
    for (const auto& [key, value] : j.items()) {
      if (value.is_object()) {
        auto p = parents;
        p.push_back(key);
        collect(value, p, items);
        continue;
      }
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (value.is_array()) {
        for (const auto& v : value) item.inputs.push_back(scalar(v));
      } else {
        item.inputs.push_back(scalar(value));
      }
      items.push_back(item);
    }
  }
};

void emit(const json& j, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << j.dump(2) << "\n";
}

ModelGraph load_or_generate(const std::string& model, const std::string& variant, std::size_t width,
                            std::size_t hw, std::uint64_t seed) {
  if (!model.empty()) return load_model(model);
  ResNetOptions o;
  o.variant = resnet_variant_from_string(variant);
  o.width = width;
  o.input = {3, hw, hw};
  o.seed = seed;
  return build_resnet_graph(o);
}

ModulusChainPlan load_plan(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open plan " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw ParseError("plan " + path + ": " + e.what());
  }
  return chain_from_json(j.contains("chain") ? j.at("chain") : j);
}

// ---- fit-poly --------------------------------------------------------------

struct FitArgs {
  int degree = 2;
  double interval = 2.0;
  int bits = 10;
  std::string out;
};

int cmd_fit_poly(const FitArgs& a) {
  const auto r = fit_relu_poly(a.degree, a.interval, a.bits);
  json report = {{"max_abs_error", r.report.max_abs_error},
                 {"sum_sq_error", r.report.sum_sq_error},
                 {"objective", r.report.objective},
                 {"truncated_terms", r.report.truncated_terms}};
  emit({{"degree", a.degree},
        {"interval", a.interval},
        {"frac_bits", a.bits},
        {"int_coeffs", r.poly.int_coeffs},
        {"coefficients", r.poly.real_coeffs()},
        {"within_box", r.poly.within_box()},
        {"report", report}},
       a.out);
  return kExitOk;
}

// ---- compile ---------------------------------------------------------------

struct CompileArgs {
  std::string model;
  std::string strategy = "P2FR";
  std::string out;
  std::string report;
};

int cmd_compile(const CompileArgs& a) {
  const auto g = load_model(a.model);
  auto [rewritten, pass] = apply_pipeline(g, strategy_from_string(a.strategy));
  if (!a.out.empty()) save_model(rewritten, a.out);
  emit(to_json(pass), a.report);
  return kExitOk;
}

// ---- levels ----------------------------------------------------------------

struct LevelsArgs {
  std::string strategy = "all";
  std::string variant = "all";
  std::string model;
  bool as_json = false;
};

int cmd_levels(const LevelsArgs& a) {
  if (!a.model.empty()) {
    const auto g = load_model(a.model);
    const Strategy s = strategy_from_string(a.strategy == "all" ? "P2FR" : a.strategy);
    const int levels = analyze_levels(g, s);
    if (a.as_json) {
      emit({{"strategy", to_string(s)}, {"levels", levels}}, "");
    } else {
      std::cout << to_string(s) << " " << levels << "\n";
    }
    return kExitOk;
  }
  std::vector<ResNetVariant> variants;
  if (a.variant == "all") {
    variants = {ResNetVariant::kRN18, ResNetVariant::kRN20, ResNetVariant::kRN32};
  } else {
    variants = {resnet_variant_from_string(a.variant)};
  }
  std::vector<Strategy> strategies;
  if (a.strategy == "all") {
    strategies = all_strategies();
  } else {
    strategies = {strategy_from_string(a.strategy)};
  }
  json j = json::object();
  if (!a.as_json) {
    std::cout << "variant";
    for (Strategy s : strategies) std::cout << " " << to_string(s);
    std::cout << "\n";
  }
  for (ResNetVariant v : variants) {
    const auto table = level_table(v);
    if (!a.as_json) std::cout << to_string(v);
    for (Strategy s : strategies) {
      if (a.as_json) {
        j[to_string(v)][to_string(s)] = table.at(s);
      } else {
        std::cout << " " << table.at(s);
      }
    }
    if (!a.as_json) std::cout << "\n";
  }
  if (a.as_json) emit(j, "");
  return kExitOk;
}

// ---- plan ------------------------------------------------------------------

struct PlanArgs {
  std::string model;
  std::string preset;
  std::string variant;
  int log2_delta = 40;
  int sublevels = 2;
  std::string out;
};

int cmd_plan(const PlanArgs& a) {
  std::optional<ModulusChainPlan> preset;
  if (!a.preset.empty()) preset = load_preset(a.preset);
  ModelGraph g;
  if (!a.model.empty()) {
    g = load_model(a.model);
  } else {
    std::string variant = a.variant;
    if (variant.empty()) variant = preset ? preset->name : "rn20";
    g = apply_pipeline(load_or_generate("", variant, 16, 32, 0), Strategy::kP2FR).first;
  }
  CompileOptions opts;
  opts.log2_delta = a.log2_delta;
  opts.sublevels = a.sublevels;
  try {
    const auto plan = plan_modulus_chain(g, opts, preset);
    json j = to_json(plan);
    j["log2_q"] = plan.chain.total_bits();
    emit(j, a.out);
  } catch (const DepthExhaustedError& e) {
    throw CheckFailure(e.what());
  }
  return kExitOk;
}

// ---- cluster ---------------------------------------------------------------

struct ClusterArgs {
  std::vector<std::string> models;
  std::string mode = "slice";
  std::size_t k = 16;
  std::uint64_t seed = 0;
  std::string out;
  std::string report;
};

int cmd_cluster(const ClusterArgs& a) {
  const ClusterMode mode = parse_cluster_mode(a.mode);
  std::vector<ModelGraph> models;
  for (const auto& m : a.models) models.push_back(load_model(m));
  if (mode != ClusterMode::kEnsemble && models.size() != 1) {
    throw ValidationError(std::string(cluster_mode_name(mode)) + " mode takes exactly one model");
  }
  std::vector<ModelGraph> quantized;
  ClusterReport report;
  if (mode == ClusterMode::kFull) {
    auto [q, r] = full_cluster(models[0], a.k, a.seed);
    quantized = {std::move(q)};
    report = std::move(r);
  } else if (mode == ClusterMode::kSlice) {
    auto [q, r] = slice_cluster(models[0], a.k, a.seed);
    quantized = {std::move(q)};
    report = std::move(r);
  } else {
    auto [q, r] = ensemble_slice_cluster(models, a.k, a.seed);
    quantized = std::move(q);
    report = std::move(r);
  }
  if (!a.out.empty()) {
    if (quantized.size() == 1) {
      save_model(quantized[0], a.out);
    } else {
      const fs::path out(a.out);
      for (std::size_t i = 0; i < quantized.size(); ++i) {
        fs::path p = out.parent_path() / (out.stem().string() + "_" + std::to_string(i) + out.extension().string());
        save_model(quantized[i], p);
      }
    }
  }
  emit(to_json(report), a.report);
  return kExitOk;
}

// ---- train-lab -------------------------------------------------------------

struct TrainArgs {
  double clip = 2.0;
  double zeta = 1e-3;
  std::vector<double> warmup{0.01, 0.02, 0.1, 0.2};
  double lr = 0.05;
  std::size_t epochs = 20;
  std::size_t batch = 32;
  std::size_t samples = 256;
  std::vector<std::size_t> hidden{8, 8};
  int degree = 2;
  int bits = 10;
  std::uint64_t seed = 0;
  double lemma_tol = 1e-8;
  std::string csv;
  std::string report;
};

int cmd_train_lab(const TrainArgs& a) {
  TrainConfig cfg;
  cfg.clip = a.clip;
  cfg.zeta = a.zeta;
  cfg.warmup = a.warmup;
  cfg.learning_rate = a.lr;
  cfg.epochs = a.epochs;
  cfg.batch_size = a.batch;
  cfg.seed = a.seed;
  try {
    cfg.validate();
  } catch (const ValidationError&) {
    throw;
  } catch (const Error& e) {
    throw ValidationError(e.what());
  }

  const auto data = make_separable_data(a.samples, a.seed);
  std::vector<std::size_t> widths{static_cast<std::size_t>(data.at(0).x.size())};
  widths.insert(widths.end(), a.hidden.begin(), a.hidden.end());
  widths.push_back(2);
  TinyMLP net(widths, fit_relu_poly(a.degree, a.clip, a.bits).poly, a.seed);

  std::ofstream csv_file;
  if (!a.csv.empty() && a.csv != "-") {
    csv_file.open(a.csv);
    if (!csv_file) throw Error("cannot write " + a.csv);
  }
  std::ostream& csv = csv_file.is_open() ? csv_file : std::cout;
  csv << "epoch,zeta,loss,ce,pen,accuracy\n" << std::setprecision(10);

  std::mt19937_64 rng(a.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  for (std::size_t e = 1; e <= a.epochs; ++e) {
    const int epoch = static_cast<int>(e);
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t s = 0; s < order.size(); s += a.batch) {
      std::vector<Sample> batch;
      for (std::size_t i = s; i < std::min(order.size(), s + a.batch); ++i) batch.push_back(data[order[i]]);
      train_step(net, batch, cfg, epoch);
    }
    const auto parts = penalty_loss(net, data, cfg, epoch);
    csv << e << "," << warmup_zeta(cfg, epoch) << "," << parts.total << "," << parts.ce << "," << parts.pen << ","
        << accuracy(net, data) << "\n";
  }

  json checks = json::array();
  bool ok = true;
  for (std::size_t l = 1; l <= net.hidden_layers(); ++l) {
    for (std::size_t i = 0; i < std::min<std::size_t>(4, data.size()); ++i) {
      // Each sample as drawn and scaled past the clip interval.
      for (double gain : {1.0, 4.0 * a.clip}) {
        Sample s = data[i];
        s.x *= gain;
        const auto l1 = lemma1_check(net, s, cfg, l);
        const auto l2 = lemma2_check(net, s, cfg, l);
        ok = ok && l1.lemma1_holds(a.lemma_tol) && l2.lemma2_holds(a.lemma_tol);
        checks.push_back({{"sample", i}, {"gain", gain}, {"lemma1", to_json(l1)}, {"lemma2", to_json(l2)}});
      }
    }
  }
  json report = {{"tolerance", a.lemma_tol}, {"all_hold", ok}, {"checks", checks}};
  if (a.report.empty()) {
    std::cerr << report.dump(2) << "\n";
  } else {
    emit(report, a.report);
  }
  return ok ? kExitOk : kExitCheck;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  std::vector<std::string> models;
  std::string plan;
  std::string input;
  bool trace = false;
  bool actual_moduli = false;
  double deviation = 0.0;
  std::string out;
};

int cmd_run(const RunArgs& a) {
  std::vector<ModelGraph> models;
  for (const auto& m : a.models) models.push_back(load_model(m));
  CompileOptions opts;
  std::optional<ModulusChainPlan> chain;
  if (!a.plan.empty()) {
    chain = load_plan(a.plan);
    opts.log2_delta = chain->log2_delta;
    opts.sublevels = chain->sublevels;
  }
  const Tensor x = read_tensor_file(a.input);
  CircuitProgram prog;
  try {
    prog = compile_circuit(models, opts, chain);
  } catch (const DepthExhaustedError& e) {
    throw CheckFailure(e.what());
  }
  RunOptions ro;
  ro.trace = a.trace;
  if (a.actual_moduli) {
    auto q = chain_moduli(prog.chain);
    if (!q) throw ValidationError("plan carries no modulus values");
    ro.moduli = std::move(*q);
  } else if (a.deviation != 0.0) {
    ro.moduli = perturbed_moduli(prog.chain, a.deviation);
  }
  const auto r = run_circuit(prog, x, ro);
  json j = {{"members", r.member_outputs},
            {"averaged", r.averaged},
            {"rescales", r.rescales},
            {"levels_used", r.levels_used},
            {"chain", prog.chain.name}};
  if (a.trace) {
    json t = json::array();
    for (const auto& e : r.trace) t.push_back(to_json(e));
    j["trace"] = t;
  }
  emit(j, a.out);
  return kExitOk;
}

// ---- compare ---------------------------------------------------------------

struct CompareArgs {
  std::string model;
  std::string variant = "rn18";
  std::size_t width = 4;
  std::size_t hw = 8;
  bool corrupt = false;
  std::string out;
};

int cmd_compare(const CompareArgs& a, PipelineConfig cfg) {
  cfg.validate();
  const auto g = load_or_generate(a.model, a.variant, a.width, a.hw, cfg.seed);
  const auto report = compare_model(g, cfg, a.corrupt);
  emit(to_json(report), a.out);
  if (!report.passed()) {
    std::cerr << "FAIL " << report.first_failure() << "\n";
    return kExitCheck;
  }
  return kExitOk;
}

// ---- generate --------------------------------------------------------------

struct GenerateArgs {
  std::string variant = "rn20";
  std::size_t width = 8;
  std::size_t hw = 8;
  std::size_t classes = 10;
  int degree = 2;
  std::uint64_t seed = 0;
  std::string out;
  std::string input_out;
};

int cmd_generate(const GenerateArgs& a) {
  ResNetOptions o;
  o.variant = resnet_variant_from_string(a.variant);
  o.width = a.width;
  o.input = {3, a.hw, a.hw};
  o.classes = a.classes;
  o.act_degree = a.degree;
  o.seed = a.seed;
  const auto g = build_resnet_graph(o);
  if (a.out.empty()) {
    std::cout << serialize_model(g) << "\n";
  } else {
    save_model(g, a.out);
  }
  if (!a.input_out.empty()) write_tensor_file(random_inputs(g, 1, a.seed + 1)[0], a.input_out);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compiler and leveled fixed-point simulator for polynomial CNNs"};
  app.require_subcommand(1);
  app.fallthrough();
  app.config_formatter(std::make_shared<JsonConfig>());
  app.set_config("--config", "", "JSON config file; flags on the command line win");

  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for every stochastic component")->capture_default_str();

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit-poly", "Quantization-aware integer fit of ReLU");
  fit_cmd->add_option("--degree,-d", fit.degree, "Polynomial degree")->capture_default_str();
  fit_cmd->add_option("--interval,-c", fit.interval, "Fit interval [-c, c]")->capture_default_str();
  fit_cmd->add_option("--bits,-b", fit.bits, "Fractional bits of coefficients and domain")->capture_default_str();
  fit_cmd->add_option("--out,-o", fit.out, "Output JSON path (stdout when omitted)");

  CompileArgs comp;
  auto* comp_cmd = app.add_subcommand("compile", "Apply a strategy's rewrite passes to a model");
  comp_cmd->add_option("--model,-m", comp.model, "Input model JSON")->required()->check(CLI::ExistingFile);
  comp_cmd->add_option("--strategy,-s", comp.strategy, "p4, p2, p2f, p2r, p2fr or p2frt")->capture_default_str();
  comp_cmd->add_option("--out,-o", comp.out, "Rewritten model path");
  comp_cmd->add_option("--report", comp.report, "Pass report path (stdout when omitted)");

  LevelsArgs lev;
  auto* lev_cmd = app.add_subcommand("levels", "Multiplicative levels per strategy");
  lev_cmd->add_option("--strategy,-s", lev.strategy, "Strategy name or all")->capture_default_str();
  lev_cmd->add_option("--variant,-v", lev.variant, "rn18, rn20, rn32 or all")->capture_default_str();
  lev_cmd->add_option("--model,-m", lev.model, "Analyze this model instead of generated variants")
      ->check(CLI::ExistingFile);
  lev_cmd->add_flag("--json", lev.as_json, "Print JSON instead of a table");

  PlanArgs plan;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a modulus chain and rescale schedule");
  plan_cmd->add_option("--model,-m", plan.model, "P2FR model (generated variant when omitted)")
      ->check(CLI::ExistingFile);
  plan_cmd->add_option("--preset,-p", plan.preset, "Preset name (rn18, rn20, rn32) or chain JSON path");
  plan_cmd->add_option("--variant,-v", plan.variant, "Generated variant when no model is given");
  plan_cmd->add_option("--log2-delta", plan.log2_delta, "log2 of the scale; a preset overrides it")
      ->capture_default_str();
  plan_cmd->add_option("--sublevels,-l", plan.sublevels, "Sublevels per rescale modulus; a preset overrides it")
      ->capture_default_str();
  plan_cmd->add_option("--out,-o", plan.out, "Output JSON path (stdout when omitted)");

  ClusterArgs clu;
  auto* clu_cmd = app.add_subcommand("cluster", "Weight clustering per layer slice");
  clu_cmd->add_option("--model,-m", clu.models, "Model JSON; repeat for ensemble mode")
      ->required()
      ->check(CLI::ExistingFile);
  clu_cmd->add_option("--mode", clu.mode, "full, slice or ensemble")->capture_default_str();
  clu_cmd->add_option("--k,-k", clu.k, "Clusters per codebook")->capture_default_str()->check(CLI::PositiveNumber);
  clu_cmd->add_option("--out,-o", clu.out, "Quantized model path; ensemble members get _<i> suffixes");
  clu_cmd->add_option("--report", clu.report, "Cluster report path (stdout when omitted)");

  TrainArgs tr;
  auto* tr_cmd = app.add_subcommand("train-lab", "Penalty training of a tiny polynomial MLP with lemma checks");
  tr_cmd->add_option("--clip,-c", tr.clip, "Activation interval bound c")->capture_default_str();
  tr_cmd->add_option("--zeta", tr.zeta, "Penalty strength")->capture_default_str();
  tr_cmd->add_option("--warmup", tr.warmup, "Warm-up factors alpha_1 < ... < alpha_T")->capture_default_str();
  tr_cmd->add_option("--lr", tr.lr, "Learning rate eta")->capture_default_str();
  tr_cmd->add_option("--epochs", tr.epochs, "Epochs")->capture_default_str();
  tr_cmd->add_option("--batch", tr.batch, "Batch size")->capture_default_str()->check(CLI::PositiveNumber);
  tr_cmd->add_option("--samples", tr.samples, "Synthetic samples")->capture_default_str()->check(CLI::PositiveNumber);
  tr_cmd->add_option("--hidden", tr.hidden, "Hidden layer widths")->capture_default_str();
  tr_cmd->add_option("--degree", tr.degree, "Activation degree")->capture_default_str();
  tr_cmd->add_option("--bits", tr.bits, "Activation coefficient bits")->capture_default_str();
  tr_cmd->add_option("--lemma-tol", tr.lemma_tol, "Relative tolerance of the lemma checks")->capture_default_str();
  tr_cmd->add_option("--csv", tr.csv, "Per-epoch CSV path (stdout when omitted)");
  tr_cmd->add_option("--report", tr.report, "Lemma report JSON path (stderr when omitted)");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Simulate encrypted inference");
  run_cmd->add_option("--model,-m", run.models, "Model JSON; repeat to pack an ensemble")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--plan,-p", run.plan, "Chain or plan JSON (planned from the model when omitted)")
      ->check(CLI::ExistingFile);
  run_cmd->add_option("--input,-i", run.input, "Tensor file: JSON header line then raw float64")
      ->required()
      ->check(CLI::ExistingFile);
  run_cmd->add_flag("--trace", run.trace, "Include the per-instruction sublevel, level and scale trace");
  run_cmd->add_flag("--actual-moduli", run.actual_moduli, "Rescale by the plan's modulus values");
  run_cmd->add_option("--deviation", run.deviation, "Rescale by Delta^l (1 + deviation)")->capture_default_str();
  run_cmd->add_option("--out,-o", run.out, "Output JSON path (stdout when omitted)");

  CompareArgs cmp;
  PipelineConfig pcfg;
  std::string cmp_strategy = "P2FR";
  auto* cmp_cmd = app.add_subcommand("compare", "End-to-end check of rewrite, levels and simulation");
  cmp_cmd->add_option("--model,-m", cmp.model, "Model JSON (generated variant when omitted)")
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--variant,-v", cmp.variant, "Generated variant")->capture_default_str();
  cmp_cmd->add_option("--width", cmp.width, "Generated first-stage width")->capture_default_str();
  cmp_cmd->add_option("--hw", cmp.hw, "Generated input height and width")->capture_default_str();
  cmp_cmd->add_option("--strategy,-s", cmp_strategy, "Strategy")->capture_default_str();
  cmp_cmd->add_option("--log2-delta", pcfg.log2_delta, "log2 of the scale")->capture_default_str();
  cmp_cmd->add_option("--samples", pcfg.samples, "Random inputs")->capture_default_str();
  cmp_cmd->add_option("--equivalence-tol", pcfg.equivalence_tol, "Rewrite tolerance")->capture_default_str();
  cmp_cmd->add_option("--simulation-tol", pcfg.simulation_tol, "Simulation tolerance")->capture_default_str();
  cmp_cmd->add_flag("--corrupt-fused", cmp.corrupt, "Perturb a fused coefficient after the rewrite");
  cmp_cmd->add_option("--out,-o", cmp.out, "Report path (stdout when omitted)");

  GenerateArgs gen;
  auto* gen_cmd = app.add_subcommand("generate", "Write a random-weight ResNet fixture");
  gen_cmd->add_option("--variant,-v", gen.variant, "rn18, rn20 or rn32")->capture_default_str();
  gen_cmd->add_option("--width", gen.width, "First-stage width")->capture_default_str();
  gen_cmd->add_option("--hw", gen.hw, "Input height and width")->capture_default_str();
  gen_cmd->add_option("--classes", gen.classes, "Output classes")->capture_default_str();
  gen_cmd->add_option("--degree", gen.degree, "Activation degree")->capture_default_str();
  gen_cmd->add_option("--out,-o", gen.out, "Model path (stdout when omitted)");
  gen_cmd->add_option("--input-out", gen.input_out, "Also write a random input tensor file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*fit_cmd) return cmd_fit_poly(fit);
    if (*comp_cmd) return cmd_compile(comp);
    if (*lev_cmd) return cmd_levels(lev);
    if (*plan_cmd) return cmd_plan(plan);
    if (*clu_cmd) {
      clu.seed = seed;
      return cmd_cluster(clu);
    }
    if (*tr_cmd) {
      tr.seed = seed;
      return cmd_train_lab(tr);
    }
    if (*run_cmd) return cmd_run(run);
    if (*cmp_cmd) {
      pcfg.seed = seed;
      pcfg.strategy = strategy_from_string(cmp_strategy);
      return cmd_compare(cmp, pcfg);
    }
    if (*gen_cmd) {
      gen.seed = seed;
      return cmd_generate(gen);
    }
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitCheck;
  } catch (const DepthExhaustedError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitCheck;
  } catch (const CapacityError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return kExitCheck;
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ShapeError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const StrategyError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitUsage;
}
