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

#include "polyvec/model.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "polyvec/errors.hpp"

namespace polyvec {

void ModelConfig::validate() const {
  if (subgraph_depth < 1 || global_depth < 1) throw parameter_error("model: depths must be >= 1");
  if (width < 1) throw parameter_error("model: width must be >= 1");
  if (alpha < 0.0) throw parameter_error("model: alpha must be >= 0");
  if (mask_prob < 0.0 || mask_prob >= 1.0) throw parameter_error("model: mask_prob must be in [0, 1)");
  if (huber_delta <= 0.0) throw parameter_error("model: huber_delta must be positive");
  if (future_steps < 1) throw parameter_error("model: future_steps must be >= 1");
}

namespace {

// Bounded uniform init, U(-sqrt(6/(fan_in+fan_out)), +...); biases and LN
// offsets start at zero, LN scales at one.
Tensor init_weight(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  Tensor t = Tensor::zeros({fan_in, fan_out}, /*requires_grad=*/true);
  for (double& v : t.values()) v = rng.uniform(-bound, bound);
  return t;
}

Tensor init_zeros(std::size_t n) { return Tensor::zeros({n}, /*requires_grad=*/true); }
Tensor init_ones(std::size_t n) { return Tensor::full({n}, 1.0, /*requires_grad=*/true); }

}  // namespace

ModelParams::ModelParams(const ModelConfig& config, Rng& rng) : config_(config) {
  config_.validate();
  const std::size_t w = config_.width;

  std::size_t in = kNodeInputWidth;
  for (std::size_t l = 0; l < config_.subgraph_depth; ++l) {
    const std::string p = "subgraph." + std::to_string(l) + ".";
    tensors_.push_back({p + "weight", init_weight(in, w, rng)});
    tensors_.push_back({p + "bias", init_zeros(w)});
    tensors_.push_back({p + "ln_gamma", init_ones(w)});
    tensors_.push_back({p + "ln_beta", init_zeros(w)});
    in = 2 * w;
  }

  std::size_t gin = config_.global_input_width();
  for (std::size_t l = 0; l < config_.global_depth; ++l) {
    const std::string p = "global." + std::to_string(l) + ".";
    tensors_.push_back({p + "wq", init_weight(gin, w, rng)});
    tensors_.push_back({p + "wk", init_weight(gin, w, rng)});
    tensors_.push_back({p + "wv", init_weight(gin, w, rng)});
    gin = w;
  }

  const std::size_t t2 = 2 * config_.future_steps;
  tensors_.push_back({"traj_dec.fc1.weight", init_weight(w, w, rng)});
  tensors_.push_back({"traj_dec.fc1.bias", init_zeros(w)});
  tensors_.push_back({"traj_dec.fc2.weight", init_weight(w, t2, rng)});
  tensors_.push_back({"traj_dec.fc2.bias", init_zeros(t2)});

  const std::size_t pf = config_.polyline_feature_width();
  tensors_.push_back({"node_dec.fc1.weight", init_weight(w, w, rng)});
  tensors_.push_back({"node_dec.fc1.bias", init_zeros(w)});
  tensors_.push_back({"node_dec.fc2.weight", init_weight(w, pf, rng)});
  tensors_.push_back({"node_dec.fc2.bias", init_zeros(pf)});
}

Tensor& ModelParams::find(const std::string& name) {
  for (NamedParam& p : tensors_) {
    if (p.name == name) return p.tensor;
  }
  throw data_error("unknown parameter: " + name);
}

const Tensor& ModelParams::find(const std::string& name) const {
  return const_cast<ModelParams*>(this)->find(name);
}

std::size_t ModelParams::scalar_count() const {
  std::size_t n = 0;
  for (const NamedParam& p : tensors_) n += p.tensor.size();
  return n;
}

std::size_t ModelParams::scalar_count_excluding(std::string_view prefix) const {
  std::size_t n = 0;
  for (const NamedParam& p : tensors_) {
    if (p.name.rfind(prefix, 0) == 0) continue;
    n += p.tensor.size();
  }
  return n;
}

ModelParams ModelParams::clone() const {
  ModelParams out = *this;
  for (NamedParam& p : out.tensors_) p.tensor = p.tensor.clone();
  return out;
}

void ModelParams::zero_grads() {
  for (NamedParam& p : tensors_) p.tensor.zero_grad();
}

std::vector<double> ModelParams::collect_grads() const {
  std::vector<double> out;
  out.reserve(scalar_count());
  for (const NamedParam& p : tensors_) {
    if (p.tensor.has_grad()) {
      out.insert(out.end(), p.tensor.grad().begin(), p.tensor.grad().end());
    } else {
      out.insert(out.end(), p.tensor.size(), 0.0);
    }
  }
  return out;
}

Tensor subgraph_layer(Graph& g, const Tensor& feats, const std::vector<std::size_t>& groups,
                      std::size_t n_groups, const SubgraphLayer& layer) {
  Tensor enc = relu(g, layer_norm(g, add_row_bias(g, matmul(g, feats, layer.weight), layer.bias),
                                  layer.ln_gamma, layer.ln_beta));
  Tensor agg = max_pool_groups(g, enc, groups, n_groups);
  Tensor context = gather_rows(g, agg, groups);
  return concat_cols(g, enc, context);
}

Tensor polyline_features(Graph& g, const Tensor& feats, const std::vector<std::size_t>& groups,
                         std::size_t n_groups) {
  return l2_normalize_rows(g, max_pool_groups(g, feats, groups, n_groups));
}

Tensor global_attention(Graph& g, const Tensor& p, const Tensor& wq, const Tensor& wk,
                        const Tensor& wv, bool scaled) {
  Tensor q = matmul(g, p, wq);
  Tensor k = matmul(g, p, wk);
  Tensor v = matmul(g, p, wv);
  Tensor scores = matmul_nt(g, q, k);
  if (scaled) scores = scale(g, scores, 1.0 / std::sqrt(static_cast<double>(wq.cols())));
  return matmul(g, softmax_rows(g, scores), v);
}

MaskDraw draw_polyline_mask(std::size_t n_polylines, std::size_t target_index, double prob,
                            Rng& rng) {
  if (prob < 0.0 || prob >= 1.0) throw parameter_error("mask probability must be in [0, 1)");
  MaskDraw draw;
  draw.masked.assign(n_polylines, false);
  for (std::size_t i = 0; i < n_polylines; ++i) {
    if (i == target_index) continue;  // the prediction subject is never masked
    if (rng.uniform() < prob) {
      draw.masked[i] = true;
      draw.masked_indices.push_back(i);
    }
  }
  return draw;
}

namespace {

// 2-layer MLP decoder head: x -> relu(x W1 + b1) W2 + b2.
Tensor decode_mlp(Graph& g, const Tensor& x, const ModelParams& params, const std::string& prefix) {
  Tensor h = relu(g, add_row_bias(g, matmul(g, x, params.find(prefix + "fc1.weight")),
                                  params.find(prefix + "fc1.bias")));
  return add_row_bias(g, matmul(g, h, params.find(prefix + "fc2.weight")),
                      params.find(prefix + "fc2.bias"));
}

}  // namespace

ForwardResult forward(Graph& g, const Scene& scene, const ModelParams& params, ForwardMode mode,
                      Rng* mask_rng) {
  if (scene.frame != SceneFrame::kNormalized) {
    throw state_error("forward: scene must be normalized first");
  }
  const ModelConfig& cfg = params.config();
  const std::size_t target_poly = scene.target_index();
  const std::size_t n_poly = scene.polylines.size();

  // Vectorize every polyline and record the node -> polyline grouping.
  std::vector<double> input;
  std::vector<std::size_t> groups;
  std::vector<double> ids(n_poly * 2);
  std::size_t n_nodes = 0;
  for (std::size_t pi = 0; pi < n_poly; ++pi) {
    const std::vector<VectorNode> nodes = build_vectors(scene.polylines[pi]);
    const Point2 pid = polyline_identifier(nodes);
    ids[pi * 2] = pid.x * kIdEmbedScale;
    ids[pi * 2 + 1] = pid.y * kIdEmbedScale;
    for (const VectorNode& v : nodes) {
      input.push_back(v.start.x);
      input.push_back(v.start.y);
      input.push_back(v.end.x);
      input.push_back(v.end.y);
      input.insert(input.end(), v.attr.begin(), v.attr.end());
      groups.push_back(pi);
      ++n_nodes;
    }
  }

  Tensor h = Tensor::from_values({n_nodes, kNodeInputWidth}, std::move(input));
  for (std::size_t l = 0; l < cfg.subgraph_depth; ++l) {
    const std::string p = "subgraph." + std::to_string(l) + ".";
    SubgraphLayer layer{params.find(p + "weight"), params.find(p + "bias"),
                        params.find(p + "ln_gamma"), params.find(p + "ln_beta")};
    h = subgraph_layer(g, h, groups, n_poly, layer);
  }
  Tensor poly = polyline_features(g, h, groups, n_poly);

  ForwardResult result;
  result.n_polylines = n_poly;
  result.n_vectors = n_nodes;

  if (mode == ForwardMode::kTrainWithMask) {
    if (mask_rng == nullptr) throw contract_error("forward: training mode needs a mask rng");
    const MaskDraw draw = draw_polyline_mask(n_poly, target_poly, cfg.mask_prob, *mask_rng);
    result.masked_polylines = draw.masked_indices;
    if (!draw.masked_indices.empty()) {
      result.node_targets = gather_rows(g, poly, draw.masked_indices);
      poly = zero_rows(g, poly, draw.masked);
    }
  }

  // The identifier embedding is appended to every row so masked polylines
  // stay addressable in the unordered global graph.
  Tensor id_embed = Tensor::from_values({n_poly, 2}, std::move(ids));
  Tensor global = concat_cols(g, poly, id_embed);
  for (std::size_t l = 0; l < cfg.global_depth; ++l) {
    const std::string p = "global." + std::to_string(l) + ".";
    const Tensor& wq = params.find(p + "wq");
    const Tensor& wk = params.find(p + "wk");
    const Tensor& wv = params.find(p + "wv");
    if (l + 1 == cfg.global_depth) {
      // Keep the target's attention row of the final layer for inspection.
      Tensor q = matmul(g, global, wq);
      Tensor k = matmul(g, global, wk);
      Tensor v = matmul(g, global, wv);
      Tensor scores = matmul_nt(g, q, k);
      if (cfg.attention_scaled) {
        scores = scale(g, scores, 1.0 / std::sqrt(static_cast<double>(cfg.width)));
      }
      Tensor attn = softmax_rows(g, scores);
      result.target_attention.assign(attn.values().begin() + target_poly * n_poly,
                                     attn.values().begin() + (target_poly + 1) * n_poly);
      global = matmul(g, attn, v);
    } else {
      global = global_attention(g, global, wq, wk, wv, cfg.attention_scaled);
    }
  }

  Tensor target_row = gather_rows(g, global, {target_poly});
  result.offsets = reshape(g, decode_mlp(g, target_row, params, "traj_dec."),
                           {cfg.future_steps, 2});

  if (mode == ForwardMode::kTrainWithMask && !result.masked_polylines.empty()) {
    Tensor masked_rows = gather_rows(g, global, result.masked_polylines);
    result.node_preds = decode_mlp(g, masked_rows, params, "node_dec.");
  }
  return result;
}

Tensor gt_offsets(const Scene& normalized_scene) {
  if (normalized_scene.frame != SceneFrame::kNormalized) {
    throw state_error("gt_offsets: scene must be normalized");
  }
  const auto& gt = normalized_scene.future_gt;
  if (gt.empty()) throw data_error("gt_offsets: scene has no future ground truth");
  std::vector<double> vals(gt.size() * 2);
  Point2 prev{0.0, 0.0};  // the target's last observed position is the origin
  for (std::size_t t = 0; t < gt.size(); ++t) {
    vals[t * 2] = gt[t].x - prev.x;
    vals[t * 2 + 1] = gt[t].y - prev.y;
    prev = gt[t];
  }
  return Tensor::from_values({gt.size(), 2}, std::move(vals));
}

Tensor model_loss(Graph& g, const ForwardResult& result, const Tensor& gt,
                  const ModelConfig& config) {
  Tensor traj = gaussian_nll(g, result.offsets, gt);
  if (result.masked_polylines.empty() || config.alpha == 0.0) return traj;
  Tensor node = huber(g, result.node_preds, result.node_targets, config.huber_delta);
  return add(g, traj, scale(g, node, config.alpha));
}

Prediction to_prediction(const ForwardResult& result, const Scene& normalized_scene) {
  if (normalized_scene.frame != SceneFrame::kNormalized || !normalized_scene.pose.has_value()) {
    throw state_error("to_prediction: scene must be normalized");
  }
  Prediction pred;
  const std::size_t t_steps = result.offsets.rows();
  pred.offsets.reserve(t_steps);
  pred.absolute.reserve(t_steps);
  Point2 pos{0.0, 0.0};
  for (std::size_t t = 0; t < t_steps; ++t) {
    const Point2 off{result.offsets.at(t, 0), result.offsets.at(t, 1)};
    pred.offsets.push_back(off);
    pos = pos + off;
    pred.absolute.push_back(to_raw_frame(pos, *normalized_scene.pose));
  }
  return pred;
}

}  // namespace polyvec
