// Copyright 2026 The polyvec Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "polyvec/checkpoint.hpp"
#include "polyvec/costmodel.hpp"
#include "polyvec/errors.hpp"
#include "polyvec/manifest.hpp"
#include "polyvec/metrics.hpp"
#include "polyvec/model.hpp"
#include "polyvec/scene_io.hpp"
#include "polyvec/scenegen.hpp"
#include "polyvec/svg_render.hpp"
#include "polyvec/train.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

polyvec::KindWeights parse_mix(const std::string& text) {
  polyvec::KindWeights weights{};
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw polyvec::parameter_error("--mix expects kind=weight pairs");
    const auto kind = polyvec::scenario_kind_from_string(item.substr(0, eq));
    weights[static_cast<std::size_t>(kind)] = std::stod(item.substr(eq + 1));
  }
  return weights;
}

std::map<std::string, std::string> flag_snapshot(const CLI::App& cmd) {
  std::map<std::string, std::string> out;
  for (const CLI::Option* opt : cmd.get_options()) {
    if (opt->results().empty()) continue;
    std::string joined;
    for (const std::string& r : opt->results()) {
      if (!joined.empty()) joined += ",";
      joined += r;
    }
    out[opt->get_name()] = joined;
  }
  return out;
}

// Deterministic train/validation split by seed.
void split_scenes(const std::vector<polyvec::Scene>& all, double val_fraction, std::uint64_t seed,
                  std::vector<polyvec::Scene>* train, std::vector<polyvec::Scene>* val) {
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  polyvec::Rng rng(polyvec::Rng::derive_seed(seed, 0x59711));
  rng.shuffle(order);
  const auto n_val = static_cast<std::size_t>(static_cast<double>(all.size()) * val_fraction);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < all.size() - n_val ? *train : *val).push_back(all[order[i]]);
  }
}

void print_report_row(std::ostream& os, const std::string& name, const polyvec::EvalReport& r) {
  os << std::left << std::setw(18) << name << std::right << std::fixed << std::setprecision(3)
     << std::setw(9) << r.de1 << std::setw(9) << r.de2 << std::setw(9) << r.de3 << std::setw(9)
     << r.ade << std::setw(9) << r.n_scenes << "\n";
}

struct ModelFlags {
  polyvec::ModelConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--width", cfg.width, "Hidden units of every MLP");
    cmd->add_option("--subgraph-depth", cfg.subgraph_depth, "Polyline subgraph layers");
    cmd->add_option("--global-depth", cfg.global_depth, "Global interaction graph layers");
    cmd->add_option("--future-steps", cfg.future_steps, "Predicted steps (0.1 s each)");
    cmd->add_option("--alpha", cfg.alpha, "Node completion loss weight");
    cmd->add_option("--mask-prob", cfg.mask_prob, "Polyline masking probability");
    cmd->add_option("--huber-delta", cfg.huber_delta, "Huber loss delta");
    cmd->add_flag("--attention-scaled", cfg.attention_scaled,
                  "Scale attention scores by 1/sqrt(width)");
  }
};

struct TrainFlags {
  polyvec::TrainConfig cfg;

  void attach(CLI::App* cmd) {
    cmd->add_option("--epochs", cfg.epochs, "Training epochs");
    cmd->add_option("--batch-size", cfg.batch_size, "Scenes per optimizer step");
    cmd->add_option("--lr", cfg.initial_lr, "Initial learning rate");
    cmd->add_option("--decay-factor", cfg.decay_factor, "LR decay factor");
    cmd->add_option("--decay-every", cfg.decay_every, "Epochs between LR decays");
    cmd->add_option("--seed", cfg.seed, "Random seed");
  }
};

json prediction_to_json(const polyvec::Scene& raw, const polyvec::ForwardResult& result,
                        const polyvec::Prediction& pred) {
  json j;
  j["target_id"] = raw.target_id;
  j["offsets"] = json::array();
  for (const auto& o : pred.offsets) j["offsets"].push_back({o.x, o.y});
  j["absolute"] = json::array();
  for (const auto& p : pred.absolute) j["absolute"].push_back({p.x, p.y});
  j["attention"] = result.target_attention;
  json ids = json::array();
  for (const auto& p : raw.polylines) ids.push_back(p.id);
  j["polyline_ids"] = ids;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"polyvec: vectorized driving scenes, trajectory prediction and cost analysis"};
  app.set_config("--config", "", "Read defaults from a TOML/INI file (flags take precedence)");
  app.require_subcommand(1);

  int exit_code = 0;

  // ---- generate ------------------------------------------------------
  auto* gen = app.add_subcommand("generate", "Write a synthetic scene dataset (JSON Lines)");
  struct {
    std::size_t n = 100;
    std::uint64_t seed = 0;
    std::string out;
    std::string mix = "straight=0.25,left_turn=0.25,right_turn=0.25,lane_change=0.25";
    polyvec::ScenarioSpec base;
  } gen_opts;
  gen->add_option("--n", gen_opts.n, "Number of scenes");
  gen->add_option("--seed", gen_opts.seed, "Random seed");
  gen->add_option("--out", gen_opts.out, "Output scene file")->required();
  gen->add_option("--mix", gen_opts.mix, "Scenario kind weights, e.g. straight=1,left_turn=1");
  gen->add_option("--noise", gen_opts.base.noise_std, "Observation noise std (m)");
  gen->add_option("--map-polylines", gen_opts.base.n_map_polylines, "Map polylines per scene");
  gen->add_option("--agents", gen_opts.base.n_other_agents, "Non-target agents per scene");
  gen->add_option("--observed-steps", gen_opts.base.observed_steps, "Observed steps (0.1 s each)");
  gen->add_option("--future-steps", gen_opts.base.future_steps, "Future steps to label");
  gen->callback([&]() {
    const auto scenes =
        polyvec::generate_dataset(gen_opts.n, parse_mix(gen_opts.mix), gen_opts.seed, gen_opts.base);
    polyvec::write_scenes(gen_opts.out, scenes);
    polyvec::RunManifest manifest;
    manifest.command = "generate";
    manifest.config = flag_snapshot(*gen);
    manifest.seed = gen_opts.seed;
    manifest.outputs = {gen_opts.out};
    manifest.write(gen_opts.out + ".manifest.json");
    std::cout << "wrote " << scenes.size() << " scenes to " << gen_opts.out << "\n";
  });

  // ---- train ---------------------------------------------------------
  auto* tr = app.add_subcommand("train", "Train a model on a scene dataset");
  struct {
    std::string data;
    std::string out_dir = "run";
    std::string resume;
    double val_fraction = 0.2;
  } tr_opts;
  ModelFlags tr_model;
  TrainFlags tr_train;
  tr->add_option("--data", tr_opts.data, "Scene file")->required();
  tr->add_option("--out", tr_opts.out_dir, "Output directory");
  tr->add_option("--val-fraction", tr_opts.val_fraction, "Held-out fraction");
  tr->add_option("--resume", tr_opts.resume, "Continue from a checkpoint");
  tr_model.attach(tr);
  tr_train.attach(tr);
  tr->callback([&]() {
    const auto all = polyvec::read_scenes(tr_opts.data);
    std::vector<polyvec::Scene> train_scenes, val_scenes;
    split_scenes(all, tr_opts.val_fraction, tr_train.cfg.seed, &train_scenes, &val_scenes);
    fs::create_directories(tr_opts.out_dir);

    polyvec::TrainIO io;
    io.history_csv = tr_opts.out_dir + "/history.csv";
    io.checkpoint_dir = tr_opts.out_dir;
    io.log = &std::cout;

    polyvec::TrainResult result = [&]() {
      if (!tr_opts.resume.empty()) {
        auto loaded = polyvec::load_checkpoint(tr_opts.resume);
        return polyvec::train_resume(std::move(loaded.params), std::move(loaded.adam),
                                     loaded.meta.epoch, train_scenes, val_scenes, tr_train.cfg,
                                     &io);
      }
      return polyvec::train(train_scenes, val_scenes, tr_model.cfg, tr_train.cfg, &io);
    }();

    polyvec::RunManifest manifest;
    manifest.command = "train";
    manifest.config = flag_snapshot(*tr);
    manifest.seed = tr_train.cfg.seed;
    manifest.inputs[tr_opts.data] = polyvec::git_blob_hash_file(tr_opts.data);
    manifest.outputs = {io.history_csv, tr_opts.out_dir + "/checkpoint.json"};
    manifest.write(tr_opts.out_dir + "/manifest.json");

    if (!result.history.empty()) {
      const auto& last = result.history.back();
      std::cout << "final val ADE " << last.val_ade << " after epoch " << last.epoch << "\n";
    }
  });

  // ---- eval ----------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint against a dataset");
  struct {
    std::string checkpoint;
    std::string data;
    std::string context = "map+agents";
    std::string csv;
  } ev_opts;
  ev->add_option("--checkpoint", ev_opts.checkpoint, "Checkpoint file")->required();
  ev->add_option("--data", ev_opts.data, "Scene file")->required();
  ev->add_option("--context", ev_opts.context, "Context filter: none | map | map+agents");
  ev->add_option("--csv", ev_opts.csv, "Also write the table as CSV");
  ev->callback([&]() {
    auto loaded = polyvec::load_checkpoint(ev_opts.checkpoint);
    const auto arm = polyvec::context_arm_from_string(ev_opts.context);
    std::vector<polyvec::Scene> scenes;
    for (const auto& s : polyvec::read_scenes(ev_opts.data)) {
      scenes.push_back(polyvec::filter_context(s, arm));
    }
    const auto model_report = polyvec::evaluate_model(loaded.params, scenes);
    const auto cv_report = polyvec::evaluate_constant_velocity(scenes);
    std::cout << std::left << std::setw(18) << "model" << std::right << std::setw(9) << "DE@1s"
              << std::setw(9) << "DE@2s" << std::setw(9) << "DE@3s" << std::setw(9) << "ADE"
              << std::setw(9) << "scenes" << "\n";
    print_report_row(std::cout, "checkpoint", model_report);
    print_report_row(std::cout, "constant-velocity", cv_report);
    if (!ev_opts.csv.empty()) {
      std::ofstream csv(ev_opts.csv);
      if (!csv) throw polyvec::file_error("cannot write " + ev_opts.csv);
      csv << "model,de1,de2,de3,ade,n_scenes\n" << std::setprecision(17);
      csv << "checkpoint," << model_report.de1 << "," << model_report.de2 << ","
          << model_report.de3 << "," << model_report.ade << "," << model_report.n_scenes << "\n";
      csv << "constant_velocity," << cv_report.de1 << "," << cv_report.de2 << "," << cv_report.de3
          << "," << cv_report.ade << "," << cv_report.n_scenes << "\n";
    }
  });

  // ---- predict -------------------------------------------------------
  auto* pr = app.add_subcommand("predict", "Predict one scene's trajectory");
  struct {
    std::string checkpoint;
    std::string scene_file;
    std::size_t index = 0;
    std::string out;
  } pr_opts;
  pr->add_option("--checkpoint", pr_opts.checkpoint, "Checkpoint file")->required();
  pr->add_option("--scene", pr_opts.scene_file, "Scene file")->required();
  pr->add_option("--index", pr_opts.index, "Scene index within the file");
  pr->add_option("--out", pr_opts.out, "Output JSON path (default: stdout)");
  pr->callback([&]() {
    auto loaded = polyvec::load_checkpoint(pr_opts.checkpoint);
    const auto scenes = polyvec::read_scenes(pr_opts.scene_file);
    if (pr_opts.index >= scenes.size()) {
      throw polyvec::parameter_error("scene index " + std::to_string(pr_opts.index) +
                                     " out of range (file has " + std::to_string(scenes.size()) +
                                     " scenes)");
    }
    const polyvec::Scene normalized = polyvec::normalize_scene(scenes[pr_opts.index]);
    polyvec::Graph graph;
    const auto result =
        polyvec::forward(graph, normalized, loaded.params, polyvec::ForwardMode::kInference);
    const auto pred = polyvec::to_prediction(result, normalized);
    const json j = prediction_to_json(scenes[pr_opts.index], result, pred);
    if (pr_opts.out.empty()) {
      std::cout << j.dump(2) << "\n";
    } else {
      std::ofstream out(pr_opts.out);
      if (!out) throw polyvec::file_error("cannot write " + pr_opts.out);
      out << j.dump(2) << "\n";
    }
  });

  // ---- analyze -------------------------------------------------------
  auto* an = app.add_subcommand("analyze", "FLOPs and parameter cost tables");
  struct {
    polyvec::SceneStats stats;
    std::string resolutions = "100,200,400";
    std::string kernels = "3,5,7";
    std::string json_out;
  } an_opts;
  ModelFlags an_model;
  an_model.attach(an);
  an->add_option("--map-polylines", an_opts.stats.map_polylines, "Scene stats: map polylines");
  an->add_option("--map-vectors", an_opts.stats.map_vectors, "Scene stats: map vectors");
  an->add_option("--agent-polylines", an_opts.stats.agent_polylines, "Scene stats: agent polylines");
  an->add_option("--agent-vectors", an_opts.stats.agent_vectors, "Scene stats: agent vectors");
  an->add_option("--targets", an_opts.stats.n_targets, "Number of prediction targets");
  an->add_option("--resolutions", an_opts.resolutions, "ConvNet input resolutions");
  an->add_option("--kernels", an_opts.kernels, "ConvNet kernel sizes");
  an->add_option("--json", an_opts.json_out, "Write the full breakdown as JSON");
  an->callback([&]() {
    const auto parse_list = [](const std::string& text) {
      std::vector<double> out;
      std::stringstream ss(text);
      std::string item;
      while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
      return out;
    };

    json breakdown;
    std::cout << std::left << std::setw(20) << "model" << std::right << std::setw(14) << "FLOPs"
              << std::setw(12) << "params" << "\n";
    const auto print_cost = [&](const std::string& name, const polyvec::CostReport& r) {
      std::cout << std::left << std::setw(20) << name << std::right << std::fixed
                << std::setprecision(3) << std::setw(13) << (r.flops / 1e9) << "G" << std::setw(12)
                << r.params << "\n";
      json item;
      item["flops"] = r.flops;
      item["params"] = r.params;
      for (const auto& b : r.breakdown) {
        item["breakdown"].push_back({{"name", b.name}, {"flops", b.flops}, {"params", b.params}});
      }
      breakdown[name] = std::move(item);
    };

    for (double k : parse_list(an_opts.kernels)) {
      for (double r : parse_list(an_opts.resolutions)) {
        const auto kk = static_cast<std::size_t>(k);
        std::ostringstream name;
        name << "convnet-k" << kk << "-r" << static_cast<int>(r);
        print_cost(name.str(), polyvec::convnet_flops(r, kk));
      }
    }
    polyvec::CostReport vec = polyvec::vector_encoder_flops(an_opts.stats, an_model.cfg);
    vec.params = polyvec::count_params(an_model.cfg).params;
    std::ostringstream vec_name;
    vec_name << "vector-encoder";
    if (an_opts.stats.n_targets != 1) vec_name << "-x" << an_opts.stats.n_targets;
    print_cost(vec_name.str(), vec);

    if (!an_opts.json_out.empty()) {
      std::ofstream out(an_opts.json_out);
      if (!out) throw polyvec::file_error("cannot write " + an_opts.json_out);
      out << breakdown.dump(2) << "\n";
    }
  });

  // ---- render --------------------------------------------------------
  auto* re = app.add_subcommand("render", "Render a scene (and prediction) to SVG");
  struct {
    std::string scene_file;
    std::size_t index = 0;
    std::string prediction;
    std::string out;
  } re_opts;
  re->add_option("--scene", re_opts.scene_file, "Scene file")->required();
  re->add_option("--index", re_opts.index, "Scene index within the file");
  re->add_option("--prediction", re_opts.prediction, "Prediction JSON from `predict`");
  re->add_option("--out", re_opts.out, "Output SVG path")->required();
  re->callback([&]() {
    const auto scenes = polyvec::read_scenes(re_opts.scene_file);
    if (re_opts.index >= scenes.size()) {
      throw polyvec::parameter_error("scene index out of range");
    }
    std::vector<polyvec::Point2> prediction;
    std::vector<double> attention;
    if (!re_opts.prediction.empty()) {
      std::ifstream in(re_opts.prediction);
      if (!in) throw polyvec::file_error("cannot open prediction: " + re_opts.prediction);
      json j;
      in >> j;
      for (const auto& p : j.value("absolute", json::array())) {
        prediction.push_back({p[0].get<double>(), p[1].get<double>()});
      }
      attention = j.value("attention", std::vector<double>{});
    }
    std::ofstream out(re_opts.out);
    if (!out) throw polyvec::file_error("cannot write " + re_opts.out);
    out << polyvec::render_scene_svg(scenes[re_opts.index], prediction, attention);
    std::cout << "wrote " << re_opts.out << "\n";
  });

  // ---- ablate --------------------------------------------------------
  auto* ab = app.add_subcommand("ablate", "Train and compare context/objective arms");
  struct {
    std::string data;
    std::string out_dir = "ablation";
    double val_fraction = 0.25;
    std::string arms = "none:off,map:off,map+agents:off,map:on,map+agents:on";
  } ab_opts;
  ModelFlags ab_model;
  TrainFlags ab_train;
  ab->add_option("--data", ab_opts.data, "Scene file")->required();
  ab->add_option("--out", ab_opts.out_dir, "Output directory");
  ab->add_option("--val-fraction", ab_opts.val_fraction, "Held-out fraction");
  ab->add_option("--arms", ab_opts.arms, "Arm list, e.g. none:off,map:on");
  ab_model.attach(ab);
  ab_train.attach(ab);
  ab->callback([&]() {
    const auto all = polyvec::read_scenes(ab_opts.data);
    std::vector<polyvec::Scene> train_scenes, val_scenes;
    split_scenes(all, ab_opts.val_fraction, ab_train.cfg.seed, &train_scenes, &val_scenes);

    std::vector<polyvec::AblationArm> arms;
    std::stringstream ss(ab_opts.arms);
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto colon = item.find(':');
      if (colon == std::string::npos) {
        throw polyvec::parameter_error("--arms expects context:on|off entries");
      }
      polyvec::AblationArm arm;
      arm.context = polyvec::context_arm_from_string(item.substr(0, colon));
      const std::string flag = item.substr(colon + 1);
      arm.node_completion = flag == "on" || flag == "yes";
      arms.push_back(arm);
    }

    const auto rows =
        polyvec::ablate(train_scenes, val_scenes, arms, ab_model.cfg, ab_train.cfg, &std::cout);
    std::cout << polyvec::format_eval_table(rows);

    fs::create_directories(ab_opts.out_dir);
    std::ofstream csv(ab_opts.out_dir + "/ablation.csv");
    if (!csv) throw polyvec::file_error("cannot write ablation.csv");
    csv << polyvec::ablation_csv(rows);
    polyvec::RunManifest manifest;
    manifest.command = "ablate";
    manifest.config = flag_snapshot(*ab);
    manifest.seed = ab_train.cfg.seed;
    manifest.inputs[ab_opts.data] = polyvec::git_blob_hash_file(ab_opts.data);
    manifest.outputs = {ab_opts.out_dir + "/ablation.csv"};
    manifest.write(ab_opts.out_dir + "/manifest.json");
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const polyvec::error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
