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

// Acceptance suite: one test per release criterion, each printing a final
// pass/fail line. Tolerances are pinned here, not configurable.

#include <gtest/gtest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>

#include "polyvec/costmodel.hpp"
#include "polyvec/metrics.hpp"
#include "polyvec/model.hpp"
#include "polyvec/scenegen.hpp"
#include "polyvec/train.hpp"
#include "testutil.hpp"

namespace polyvec {
namespace {

using testutil::max_grad_rel_err;
using testutil::random_tensor;
using testutil::rel_err;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

void print_result(int criterion, const std::string& detail) {
  std::cout << "[criterion " << criterion << "] "
            << (::testing::Test::HasFailure() ? "FAIL" : "PASS") << ": " << detail << "\n";
}

// Deterministic split shared with the CLI.
void split_scenes(const std::vector<Scene>& all, double val_fraction, std::uint64_t seed,
                  std::vector<Scene>* train, std::vector<Scene>* val) {
  std::vector<std::size_t> order(all.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(Rng::derive_seed(seed, 0x59711));
  rng.shuffle(order);
  const auto n_val = static_cast<std::size_t>(static_cast<double>(all.size()) * val_fraction);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < all.size() - n_val ? *train : *val).push_back(all[order[i]]);
  }
}

// ----- criterion 5/7 shared training run -------------------------------

constexpr std::uint64_t kDeskSeed = 11;

struct DeskRun {
  std::vector<Scene> train_scenes;
  std::vector<Scene> val_scenes;
  double cv_val_ade;
  TrainResult result;
  double runtime_seconds;
};

ModelConfig desk_model_config() {
  ModelConfig cfg;
  cfg.width = 16;
  return cfg;
}

TrainConfig desk_train_config() {
  TrainConfig cfg;
  cfg.epochs = 25;
  cfg.seed = kDeskSeed;
  return cfg;
}

const DeskRun& desk_run() {
  static const DeskRun run = []() {
    const KindWeights mix{0.0, 0.25, 0.25, 0.25, 0.25};
    const auto scenes = generate_dataset(2000, mix, kDeskSeed);
    std::vector<Scene> train_scenes, val_scenes;
    split_scenes(scenes, 0.2, kDeskSeed, &train_scenes, &val_scenes);
    const double cv = evaluate_constant_velocity(val_scenes).ade;
    Timer timer;
    TrainResult result = train(train_scenes, val_scenes, desk_model_config(), desk_train_config());
    const double secs = timer.seconds();
    return DeskRun{std::move(train_scenes), std::move(val_scenes), cv, std::move(result), secs};
  }();
  return run;
}

// ----- criterion 1: gradient suite --------------------------------------

double weighted_sum(Graph& g, const Tensor& out, const Tensor& w) {
  return matmul(g, reshape(g, out, {1, out.size()}), reshape(g, w, {out.size(), 1})).item();
}

TEST(Acceptance, Criterion1GradientSuite) {
  Timer timer;
  Rng rng(71);
  double worst_primitive = 0.0;

  const auto check = [&](const char* name, Tensor& input, const std::vector<double>& analytic,
                         const std::function<double()>& eval) {
    const double err = max_grad_rel_err(input.values(), analytic, eval);
    EXPECT_LE(err, 1e-4) << name;
    worst_primitive = std::max(worst_primitive, err);
  };

  {  // matmul (both arguments)
    Tensor a = random_tensor({3, 4}, rng), b = random_tensor({4, 2}, rng);
    Tensor w = random_tensor({3, 2}, rng, false);
    const auto eval = [&]() {
      Graph g;
      return weighted_sum(g, matmul(g, a, b), w);
    };
    Graph g;
    Tensor loss = matmul(g, reshape(g, matmul(g, a, b), {1, 6}), reshape(g, w, {6, 1}));
    g.backward(loss);
    check("matmul.a", a, a.grad(), eval);
    check("matmul.b", b, b.grad(), eval);
  }
  {  // matmul_nt
    Tensor a = random_tensor({3, 5}, rng), b = random_tensor({4, 5}, rng);
    Tensor w = random_tensor({3, 4}, rng, false);
    const auto eval = [&]() {
      Graph g;
      return weighted_sum(g, matmul_nt(g, a, b), w);
    };
    Graph g;
    Tensor loss = matmul(g, reshape(g, matmul_nt(g, a, b), {1, 12}), reshape(g, w, {12, 1}));
    g.backward(loss);
    check("matmul_nt.a", a, a.grad(), eval);
    check("matmul_nt.b", b, b.grad(), eval);
  }
  {  // relu away from the kink
    Tensor x = Tensor::zeros({2, 6}, true);
    for (double& v : x.values()) {
      do {
        v = rng.uniform(-1.0, 1.0);
      } while (std::abs(v) < 1e-2);
    }
    Tensor w = random_tensor({2, 6}, rng, false);
    const auto eval = [&]() {
      Graph g;
      return weighted_sum(g, relu(g, x), w);
    };
    Graph g;
    Tensor loss = matmul(g, reshape(g, relu(g, x), {1, 12}), reshape(g, w, {12, 1}));
    g.backward(loss);
    check("relu", x, x.grad(), eval);
  }
  {  // layer_norm, all three arguments
    Tensor x = random_tensor({3, 5}, rng);
    Tensor gamma = random_tensor({5}, rng, true, 0.5, 1.5);
    Tensor beta = random_tensor({5}, rng);
    Tensor w = random_tensor({3, 5}, rng, false);
    const auto eval = [&]() {
      Graph g;
      return weighted_sum(g, layer_norm(g, x, gamma, beta), w);
    };
    Graph g;
    Tensor loss =
        matmul(g, reshape(g, layer_norm(g, x, gamma, beta), {1, 15}), reshape(g, w, {15, 1}));
    g.backward(loss);
    check("layer_norm.x", x, x.grad(), eval);
    check("layer_norm.gamma", gamma, gamma.grad(), eval);
    check("layer_norm.beta", beta, beta.grad(), eval);
  }
  {  // softmax rows
    Tensor x = random_tensor({2, 4}, rng);
    Tensor w = random_tensor({2, 4}, rng, false);
    const auto eval = [&]() {
      Graph g;
      return weighted_sum(g, softmax_rows(g, x), w);
    };
    Graph g;
    Tensor loss = matmul(g, reshape(g, softmax_rows(g, x), {1, 8}), reshape(g, w, {8, 1}));
    g.backward(loss);
    check("softmax_rows", x, x.grad(), eval);
  }
  {  // l2 normalize away from zero rows
    Tensor x = random_tensor({3, 4}, rng, true, 0.4, 1.4);
    Tensor w = random_tensor({3, 4}, rng, false);
    const auto eval = [&]() {
      Graph g;
      return weighted_sum(g, l2_normalize_rows(g, x), w);
    };
    Graph g;
    Tensor loss =
        matmul(g, reshape(g, l2_normalize_rows(g, x), {1, 12}), reshape(g, w, {12, 1}));
    g.backward(loss);
    check("l2_normalize_rows", x, x.grad(), eval);
  }
  {  // concat + gather + zero_rows + max_pool, composed
    Tensor a = random_tensor({4, 2}, rng);
    Tensor b = random_tensor({4, 3}, rng);
    const std::vector<std::size_t> groups{0, 0, 1, 1};
    Tensor w = random_tensor({4, 5}, rng, false);
    const auto eval = [&]() {
      Graph g;
      Tensor cat = concat_cols(g, a, b);
      Tensor pooled = max_pool_groups(g, cat, groups, 2);
      Tensor spread = gather_rows(g, pooled, groups);
      Tensor masked = zero_rows(g, spread, {false, true, false, false});
      return weighted_sum(g, masked, w);
    };
    Graph g;
    Tensor cat = concat_cols(g, a, b);
    Tensor pooled = max_pool_groups(g, cat, groups, 2);
    Tensor spread = gather_rows(g, pooled, groups);
    Tensor masked = zero_rows(g, spread, {false, true, false, false});
    Tensor loss = matmul(g, reshape(g, masked, {1, 20}), reshape(g, w, {20, 1}));
    g.backward(loss);
    check("pool_gather_concat", a, a.grad(), eval);
    check("pool_gather_concat.b", b, b.grad(), eval);
  }
  {  // huber with residuals away from the delta kink
    Tensor pred = Tensor::from_values({2, 3}, {0.3, -0.5, 1.4, -1.6, 0.7, 1.2}, true);
    Tensor target = Tensor::zeros({2, 3}, true);
    const auto eval = [&]() {
      Graph g;
      return huber(g, pred, target, 1.0).item();
    };
    Graph g;
    Tensor loss = huber(g, pred, target, 1.0);
    g.backward(loss);
    check("huber.pred", pred, pred.grad(), eval);
    check("huber.target", target, target.grad(), eval);
  }
  {  // gaussian negative log-likelihood
    Tensor pred = random_tensor({5, 2}, rng);
    Tensor gt = random_tensor({5, 2}, rng);
    const auto eval = [&]() {
      Graph g;
      return gaussian_nll(g, pred, gt).item();
    };
    Graph g;
    Tensor loss = gaussian_nll(g, pred, gt);
    g.backward(loss);
    check("gaussian_nll.pred", pred, pred.grad(), eval);
    check("gaussian_nll.gt", gt, gt.grad(), eval);
  }
  {  // scale + add + add_row_bias + sum_all
    Tensor x = random_tensor({3, 3}, rng);
    Tensor y = random_tensor({3, 3}, rng);
    Tensor bias = random_tensor({3}, rng);
    const auto eval = [&]() {
      Graph g;
      return sum_all(g, add(g, scale(g, x, 1.7), add_row_bias(g, y, bias))).item();
    };
    Graph g;
    Tensor loss = sum_all(g, add(g, scale(g, x, 1.7), add_row_bias(g, y, bias)));
    g.backward(loss);
    check("scale", x, x.grad(), eval);
    check("add", y, y.grad(), eval);
    check("add_row_bias.bias", bias, bias.grad(), eval);
  }

  // End-to-end: full model loss on a 3-polyline scene, 25 sampled parameters
  // against central finite differences.
  ScenarioSpec spec;
  spec.kind = ScenarioKind::kLeftTurn;
  spec.n_map_polylines = 1;
  spec.n_other_agents = 1;
  spec.seed = 5;
  const Scene scene = normalize_scene(generate(spec));
  ASSERT_EQ(scene.polylines.size(), 3u);

  ModelConfig cfg;  // release architecture: width 64, depths 3/1
  cfg.mask_prob = 0.5;
  Rng init(99);
  ModelParams params(cfg, init);
  const Tensor gt = gt_offsets(scene);
  // first seed whose draw masks at least one polyline, so the node term is live
  std::uint64_t mask_seed = 0;
  for (std::uint64_t s = 1; s < 100 && mask_seed == 0; ++s) {
    Rng probe(s);
    if (!draw_polyline_mask(scene.polylines.size(), scene.target_index(), cfg.mask_prob, probe)
             .masked_indices.empty()) {
      mask_seed = s;
    }
  }
  ASSERT_NE(mask_seed, 0u);

  const auto loss_value = [&]() {
    Graph g;
    Rng mask_rng(mask_seed);
    const ForwardResult r = forward(g, scene, params, ForwardMode::kTrainWithMask, &mask_rng);
    return model_loss(g, r, gt, cfg).item();
  };

  {
    // backward zeroes every gradient the graph touches before accumulating
    Graph g;
    Rng mask_rng(mask_seed);
    const ForwardResult r = forward(g, scene, params, ForwardMode::kTrainWithMask, &mask_rng);
    ASSERT_FALSE(r.masked_polylines.empty());  // the node term must be live
    Tensor loss = model_loss(g, r, gt, cfg);
    g.backward(loss);
  }

  Rng pick(2025);
  double worst_e2e = 0.0;
  for (int i = 0; i < 25; ++i) {
    auto& tensors = params.tensors();
    NamedParam& p = tensors[pick.uniform_int(tensors.size())];
    const std::size_t idx = pick.uniform_int(p.tensor.size());
    const double analytic = p.tensor.grad()[idx];

    double& x = p.tensor.values()[idx];
    const double saved = x;
    const double eps = 1e-5;
    x = saved + eps;
    const double hi = loss_value();
    x = saved - eps;
    const double lo = loss_value();
    x = saved;
    const double numeric = (hi - lo) / (2.0 * eps);
    const double err = rel_err(analytic, numeric);
    EXPECT_LE(err, 1e-3) << p.name << "[" << idx << "]";
    worst_e2e = std::max(worst_e2e, err);
  }

  const double secs = timer.seconds();
  EXPECT_LT(secs, 30.0);
  std::ostringstream detail;
  detail << "primitive rel-err <= " << worst_primitive << ", end-to-end rel-err <= " << worst_e2e
         << " over 25 params, " << secs << " s";
  print_result(1, detail.str());
}

// ----- criterion 2: symmetry suite ---------------------------------------

Scene permuted_scene(const Scene& s, const std::vector<std::size_t>& order) {
  Scene out = s;
  out.polylines.clear();
  for (std::size_t idx : order) out.polylines.push_back(s.polylines[idx]);
  return out;
}

TEST(Acceptance, Criterion2SymmetrySuite) {
  Timer timer;
  Rng init(202);
  ModelConfig cfg;
  cfg.width = 16;
  ModelParams params(cfg, init);

  double worst_perm = 0.0, worst_rigid = 0.0, worst_attn = 0.0, worst_norm = 0.0;
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    ScenarioSpec spec;
    spec.kind = static_cast<ScenarioKind>(1 + seed % 4);
    spec.seed = 500 + seed;
    const Scene raw = generate(spec);
    const Scene base = normalize_scene(raw);

    Graph g;
    const ForwardResult r = forward(g, base, params, ForwardMode::kInference);

    // attention row of the final global layer sums to one
    double attn_sum = 0.0;
    for (double a : r.target_attention) attn_sum += a;
    worst_attn = std::max(worst_attn, std::abs(attn_sum - 1.0));
    EXPECT_NEAR(attn_sum, 1.0, 1e-12);

    // vector permutation inside the crosswalk polygon plus polyline-order
    // permutation leave the prediction unchanged
    Scene reordered = raw;
    for (Polyline& p : reordered.polylines) {
      if (p.kind == PolylineKind::kCrosswalk && p.points.size() > 3) {
        std::vector<Point2> open(p.points.begin(), p.points.end() - 1);
        std::rotate(open.begin(), open.begin() + 2, open.end());
        open.push_back(open.front());
        p.points = std::move(open);
      }
    }
    std::vector<std::size_t> order(raw.polylines.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = (i + 3) % order.size();
    const Scene permuted = normalize_scene(permuted_scene(reordered, order));
    Graph g2;
    const ForwardResult r2 = forward(g2, permuted, params, ForwardMode::kInference);
    for (std::size_t i = 0; i < r.offsets.size(); ++i) {
      const double diff = std::abs(r.offsets.values()[i] - r2.offsets.values()[i]);
      worst_perm = std::max(worst_perm, diff);
      EXPECT_LE(diff, 1e-9);
    }

    // rigid-motion equivariance of the absolute prediction
    const double angle = 0.9 + 0.3 * static_cast<double>(seed);
    const Point2 shift{25.0 + static_cast<double>(seed), -60.0};
    Scene moved = raw;
    for (Polyline& p : moved.polylines) {
      for (Point2& pt : p.points) pt = rotate(pt, angle) + shift;
    }
    for (Point2& pt : moved.future_gt) pt = rotate(pt, angle) + shift;
    const Scene moved_norm = normalize_scene(moved);
    Graph g3;
    const Prediction p1 = to_prediction(r, base);
    const Prediction p2 =
        to_prediction(forward(g3, moved_norm, params, ForwardMode::kInference), moved_norm);
    for (std::size_t t = 0; t < p1.absolute.size(); ++t) {
      const Point2 expect = rotate(p1.absolute[t], angle) + shift;
      worst_rigid = std::max({worst_rigid, std::abs(p2.absolute[t].x - expect.x),
                              std::abs(p2.absolute[t].y - expect.y)});
      EXPECT_NEAR(p2.absolute[t].x, expect.x, 1e-6);
      EXPECT_NEAR(p2.absolute[t].y, expect.y, 1e-6);
    }

    // polyline features entering the global graph are unit norm
    std::vector<double> input;
    std::vector<std::size_t> groups;
    std::size_t n_nodes = 0;
    for (std::size_t pi = 0; pi < base.polylines.size(); ++pi) {
      for (const VectorNode& v : build_vectors(base.polylines[pi])) {
        input.push_back(v.start.x);
        input.push_back(v.start.y);
        input.push_back(v.end.x);
        input.push_back(v.end.y);
        input.insert(input.end(), v.attr.begin(), v.attr.end());
        groups.push_back(pi);
        ++n_nodes;
      }
    }
    Graph g4;
    Tensor h = Tensor::from_values({n_nodes, kNodeInputWidth}, std::move(input));
    for (std::size_t l = 0; l < cfg.subgraph_depth; ++l) {
      const std::string prefix = "subgraph." + std::to_string(l) + ".";
      SubgraphLayer layer{params.find(prefix + "weight"), params.find(prefix + "bias"),
                          params.find(prefix + "ln_gamma"), params.find(prefix + "ln_beta")};
      h = subgraph_layer(g4, h, groups, base.polylines.size(), layer);
    }
    Tensor poly = polyline_features(g4, h, groups, base.polylines.size());
    for (std::size_t row = 0; row < poly.rows(); ++row) {
      double s = 0.0;
      for (std::size_t c = 0; c < poly.cols(); ++c) s += poly.at(row, c) * poly.at(row, c);
      worst_norm = std::max(worst_norm, std::abs(std::sqrt(s) - 1.0));
      EXPECT_NEAR(std::sqrt(s), 1.0, 1e-9);
    }
  }

  const double secs = timer.seconds();
  EXPECT_LT(secs, 10.0);
  std::ostringstream detail;
  detail << "permutation dev " << worst_perm << ", rigid dev " << worst_rigid << " m, attention dev "
         << worst_attn << ", feature norm dev " << worst_norm << ", " << secs << " s";
  print_result(2, detail.str());
}

// ----- criterion 3: parameter count --------------------------------------

TEST(Acceptance, Criterion3ParameterCount) {
  ModelConfig cfg;  // width 64, subgraph depth 3, global depth 1
  const CostReport report = count_params(cfg);
  EXPECT_GE(report.params, 50000u);
  EXPECT_LE(report.params, 100000u);

  Rng rng(3);
  ModelParams params(cfg, rng);
  EXPECT_EQ(report.params, params.scalar_count_excluding(kTrajDecoderPrefix));

  std::ostringstream detail;
  detail << "encoder params " << report.params << " in [50K, 100K], reference 72K; matches "
         << "allocated scalar count exactly";
  print_result(3, detail.str());
}

// ----- criterion 4: FLOPs ------------------------------------------------

TEST(Acceptance, Criterion4Flops) {
  const SceneStats stats;  // 17/205 map, 59/590 agents
  const ModelConfig cfg;
  const CostReport vec = vector_encoder_flops(stats, cfg);
  EXPECT_GE(vec.flops, 0.02e9);
  EXPECT_LE(vec.flops, 0.08e9);

  for (std::size_t k : {2u, 5u}) {
    SceneStats multi = stats;
    multi.n_targets = k;
    EXPECT_EQ(vector_encoder_flops(multi, cfg).flops, static_cast<double>(k) * vec.flops);
  }

  for (std::size_t k : {3u, 5u, 7u}) {
    EXPECT_EQ(convnet_flops(200, k).flops, 4.0 * convnet_flops(100, k).flops);
    EXPECT_EQ(convnet_flops(400, k).flops, 4.0 * convnet_flops(200, k).flops);
  }
  EXPECT_EQ(convnet_flops(100, 3).params, convnet_flops(200, 3).params);
  EXPECT_EQ(convnet_flops(200, 3).params, convnet_flops(400, 3).params);

  const double p3 = static_cast<double>(convnet_flops(400, 3).params);
  const double p5 = static_cast<double>(convnet_flops(400, 5).params);
  const double p7 = static_cast<double>(convnet_flops(400, 7).params);
  EXPECT_NEAR(p5 / p3, 509.0 / 246.0, 0.1 * 509.0 / 246.0);
  EXPECT_NEAR(p7 / p3, 902.0 / 246.0, 0.1 * 902.0 / 246.0);

  std::ostringstream detail;
  detail << "encoder " << vec.flops / 1e9 << "G (reference 0.041G), exactly linear in targets; "
         << "convnet resolution ratio exactly 4.0, kernel param ratios " << p5 / p3 << " / "
         << p7 / p3 << " vs 2.07 / 3.67";
  print_result(4, detail.str());
}

// ----- criterion 5: learning at desk scale --------------------------------

TEST(Acceptance, Criterion5DeskScaleLearning) {
  const DeskRun& run = desk_run();
  ASSERT_FALSE(run.result.history.empty());
  const double final_ade = run.result.history.back().val_ade;

  EXPECT_LT(final_ade, 0.5 * run.cv_val_ade);
  EXPECT_LT(run.runtime_seconds, 30.0 * 60.0);

  // rerunning with the same seed reproduces the trajectory bitwise
  const TrainResult replay =
      train(run.train_scenes, run.val_scenes, desk_model_config(), desk_train_config());
  ASSERT_EQ(replay.history.size(), run.result.history.size());
  for (std::size_t e = 0; e < replay.history.size(); ++e) {
    EXPECT_EQ(replay.history[e].train_loss, run.result.history[e].train_loss);
    EXPECT_EQ(replay.history[e].val_ade, run.result.history[e].val_ade);
    EXPECT_EQ(replay.history[e].val_node_loss, run.result.history[e].val_node_loss);
  }
  for (std::size_t t = 0; t < replay.params.tensors().size(); ++t) {
    EXPECT_EQ(replay.params.tensors()[t].tensor.values(),
              run.result.params.tensors()[t].tensor.values());
  }

  std::ostringstream detail;
  detail << "held-out ADE " << final_ade << " m vs constant-velocity " << run.cv_val_ade << " m ("
         << 100.0 * final_ade / run.cv_val_ade << "% < 50%), " << run.runtime_seconds
         << " s < 30 min, bitwise reproducible";
  print_result(5, detail.str());
}

// ----- criterion 6: ablation trend ----------------------------------------

TEST(Acceptance, Criterion6AblationTrend) {
  const std::uint64_t seed = 23;
  const KindWeights turn_heavy{0.0, 0.1, 0.35, 0.35, 0.2};
  const auto scenes = generate_dataset(2400, turn_heavy, seed);
  std::vector<Scene> train_scenes, val_scenes;
  split_scenes(scenes, 0.25, seed, &train_scenes, &val_scenes);

  ModelConfig cfg;
  cfg.width = 32;
  TrainConfig tc;
  tc.epochs = 25;
  tc.seed = seed;

  const std::vector<AblationArm> arms{{ContextArm::kTargetOnly, false},
                                      {ContextArm::kMap, false},
                                      {ContextArm::kMapAgents, false}};
  const auto rows = ablate(train_scenes, val_scenes, arms, cfg, tc);
  ASSERT_EQ(rows.size(), 3u);
  const double none_ade = rows[0].report.ade;
  const double map_ade = rows[1].report.ade;
  const double both_ade = rows[2].report.ade;

  EXPECT_LE(both_ade, map_ade);
  EXPECT_LE(map_ade, none_ade);
  EXPECT_GE((none_ade - map_ade) / none_ade, 0.10);

  std::ostringstream detail;
  detail << "ADE none " << none_ade << " >= map " << map_ade << " >= map+agents " << both_ade
         << "; none->map gap " << 100.0 * (none_ade - map_ade) / none_ade << "% >= 10%";
  print_result(6, detail.str());
}

// ----- criterion 7: node completion ----------------------------------------

TEST(Acceptance, Criterion7NodeCompletion) {
  // Dedicated run: large batches keep the first-epoch measurement close to
  // initialization, the masked-feature loss must at least halve by epoch 25.
  const std::uint64_t seed = 21;
  const KindWeights mix{0.0, 0.25, 0.25, 0.25, 0.25};
  const auto scenes = generate_dataset(2000, mix, seed);
  std::vector<Scene> train_scenes, val_scenes;
  split_scenes(scenes, 0.2, seed, &train_scenes, &val_scenes);

  ModelConfig cfg;
  cfg.width = 16;  // mask_prob 0.15 and alpha 1.0 are the defaults
  TrainConfig tc;
  tc.epochs = 25;
  tc.batch_size = 128;
  tc.seed = seed;
  const TrainResult result = train(train_scenes, val_scenes, cfg, tc);

  const double first = result.history.front().val_node_loss;
  const double last = result.history.back().val_node_loss;
  ASSERT_GT(first, 0.0);
  EXPECT_LE(last, 0.5 * first);

  // Whether the auxiliary objective helps ADE at this scale is reported, not
  // asserted: compare the shared desk run against an alpha = 0 twin.
  const DeskRun& with_aux = desk_run();
  ModelConfig no_aux_cfg = desk_model_config();
  no_aux_cfg.alpha = 0.0;
  no_aux_cfg.mask_prob = 0.0;
  const TrainResult no_aux =
      train(with_aux.train_scenes, with_aux.val_scenes, no_aux_cfg, desk_train_config());

  std::ostringstream detail;
  detail << "masked-feature Huber " << first << " (epoch 1) -> " << last << " (epoch 25), ratio "
         << last / first << " <= 0.5; reported ADE with aux "
         << with_aux.result.history.back().val_ade << " vs without "
         << no_aux.history.back().val_ade << " (not asserted)";
  print_result(7, detail.str());
}

// ----- criterion 8: schedule and optimizer ---------------------------------

TEST(Acceptance, Criterion8ScheduleAndOptimizer) {
  TrainConfig cfg;
  EXPECT_DOUBLE_EQ(lr_at(0, cfg), 0.001);
  EXPECT_DOUBLE_EQ(lr_at(5, cfg), 0.001 * 0.3);
  EXPECT_DOUBLE_EQ(lr_at(10, cfg), 0.001 * 0.3 * 0.3);
  EXPECT_DOUBLE_EQ(lr_at(15, cfg), 0.001 * 0.3 * 0.3 * 0.3);
  EXPECT_DOUBLE_EQ(lr_at(20, cfg), 0.001 * 0.3 * 0.3 * 0.3 * 0.3);
  EXPECT_NEAR(lr_at(0, cfg), 1e-3, 1e-15);
  EXPECT_NEAR(lr_at(5, cfg), 3e-4, 1e-15);
  EXPECT_NEAR(lr_at(10, cfg), 9e-5, 1e-15);
  EXPECT_NEAR(lr_at(15, cfg), 2.7e-5, 1e-15);
  EXPECT_NEAR(lr_at(20, cfg), 8.1e-6, 1e-15);

  // one Adam step on every parameter against an independent scalar rollout
  ModelConfig mc;
  mc.width = 4;
  Rng rng(8);
  ModelParams params(mc, rng);
  AdamState state = AdamState::for_params(params);
  std::vector<std::vector<double>> grads;
  std::vector<std::vector<double>> expected;
  Rng grad_rng(9);
  for (const NamedParam& p : params.tensors()) {
    std::vector<double> g(p.tensor.size());
    for (double& x : g) x = grad_rng.normal();
    grads.push_back(g);
    std::vector<double> exp_vals = p.tensor.values();
    for (std::size_t i = 0; i < exp_vals.size(); ++i) {
      // scalar hand rollout: first step with zero moments
      const double m = (1.0 - cfg.beta1) * g[i];
      const double v = (1.0 - cfg.beta2) * g[i] * g[i];
      const double mhat = m / (1.0 - cfg.beta1);
      const double vhat = v / (1.0 - cfg.beta2);
      exp_vals[i] -= 0.01 * mhat / (std::sqrt(vhat) + cfg.adam_eps);
    }
    expected.push_back(std::move(exp_vals));
  }
  adam_step(params, grads, state, 0.01, cfg);
  double worst = 0.0;
  for (std::size_t t = 0; t < expected.size(); ++t) {
    for (std::size_t i = 0; i < expected[t].size(); ++i) {
      worst = std::max(worst, std::abs(params.tensors()[t].tensor.values()[i] - expected[t][i]));
      EXPECT_NEAR(params.tensors()[t].tensor.values()[i], expected[t][i], 1e-12);
    }
  }

  std::ostringstream detail;
  detail << "lr schedule 0.001/3e-4/9e-5/2.7e-5/8.1e-6 at epochs 0/5/10/15/20; Adam vs scalar "
         << "oracle within " << worst;
  print_result(8, detail.str());
}

}  // namespace
}  // namespace polyvec
