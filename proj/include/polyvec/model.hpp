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

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "polyvec/ops.hpp"
#include "polyvec/rng.hpp"
#include "polyvec/scene.hpp"
#include "polyvec/tensor.hpp"

namespace polyvec {

/// Architecture hyperparameters.
struct ModelConfig {
  std::size_t subgraph_depth = 3;  // polyline subgraph layers
  std::size_t global_depth = 1;    // global interaction graph layers
  std::size_t width = 64;          // hidden units of every MLP
  std::size_t future_steps = 30;   // predicted offsets (0.1 s each)
  double alpha = 1.0;              // node-completion loss weight
  double mask_prob = 0.15;
  double huber_delta = 1.0;
  /// Off by default: the attention scores are a plain dot product. Enables
  /// 1/sqrt(width) scaling for ablation.
  bool attention_scaled = false;

  void validate() const;

  /// Width of a polyline feature row (concat of node encoding and pooled
  /// polyline context).
  std::size_t polyline_feature_width() const { return 2 * width; }
  /// Global-graph input width: polyline feature plus the 2-wide identifier
  /// embedding, which is always appended.
  std::size_t global_input_width() const { return polyline_feature_width() + 2; }
};

/// One named parameter tensor.
struct NamedParam {
  std::string name;
  Tensor tensor;
};

/// Parameter names are grouped by prefix; the trajectory decoder prefix is
/// the part excluded from cost accounting.
inline constexpr std::string_view kTrajDecoderPrefix = "traj_dec.";

/// The identifier embedding (min of start coordinates) is appended in units
/// of 100 m so its numeric range matches the unit-normalized polyline
/// features; raw meters saturate the attention softmax at initialization.
inline constexpr double kIdEmbedScale = 0.01;

/// All learnable weights. Tensors are allocated once and updated in place by
/// the optimizer; forward/backward never mutates values.
class ModelParams {
 public:
  ModelParams(const ModelConfig& config, Rng& rng);

  const ModelConfig& config() const { return config_; }

  std::vector<NamedParam>& tensors() { return tensors_; }
  const std::vector<NamedParam>& tensors() const { return tensors_; }
  Tensor& find(const std::string& name);
  const Tensor& find(const std::string& name) const;

  std::size_t scalar_count() const;
  std::size_t scalar_count_excluding(std::string_view prefix) const;

  ModelParams clone() const;

  void zero_grads();
  /// Flattens all gradients in registration order.
  std::vector<double> collect_grads() const;

 private:
  ModelConfig config_;
  std::vector<NamedParam> tensors_;
};

/// References to one subgraph layer's tensors.
struct SubgraphLayer {
  Tensor weight;  // in x width
  Tensor bias;    // width
  Tensor ln_gamma;
  Tensor ln_beta;
};

/// enc = relu(layer_norm(feats * W + b)); out[i] = [enc[i] | max over the
/// node's polyline of enc]. The pooled set includes the node itself.
Tensor subgraph_layer(Graph& g, const Tensor& feats, const std::vector<std::size_t>& groups,
                      std::size_t n_groups, const SubgraphLayer& layer);

/// Per-polyline maxpool of the final subgraph outputs, L2-normalized so the
/// node-completion objective cannot shrink feature magnitudes.
Tensor polyline_features(Graph& g, const Tensor& feats, const std::vector<std::size_t>& groups,
                         std::size_t n_groups);

/// Single-head self-attention over the fully connected polyline graph:
/// softmax(Q K^T [/ sqrt(width)]) V.
Tensor global_attention(Graph& g, const Tensor& p, const Tensor& wq, const Tensor& wk,
                        const Tensor& wv, bool scaled);

/// Which polylines were masked for node completion.
struct MaskDraw {
  std::vector<bool> masked;                 // per polyline
  std::vector<std::size_t> masked_indices;  // ascending
};

/// Every polyline except the target is masked independently with the given
/// probability. Draw order is polyline order, one uniform per candidate.
MaskDraw draw_polyline_mask(std::size_t n_polylines, std::size_t target_index, double prob,
                            Rng& rng);

enum class ForwardMode { kTrainWithMask, kInference };

struct ForwardResult {
  Tensor offsets;       // future_steps x 2, normalized frame
  Tensor node_preds;    // |mask| x polyline_feature_width
  Tensor node_targets;  // pre-mask features of the masked polylines
  std::vector<std::size_t> masked_polylines;
  /// Attention weights of the target polyline's row in the last global
  /// layer (one weight per polyline).
  std::vector<double> target_attention;
  std::size_t n_polylines = 0;
  std::size_t n_vectors = 0;
};

/// Runs the full encoder/decoder stack on a normalized scene. In inference
/// mode masking and node decoding are skipped. mask_rng is only read in
/// training mode.
ForwardResult forward(Graph& g, const Scene& scene, const ModelParams& params, ForwardMode mode,
                      Rng* mask_rng = nullptr);

/// Ground-truth per-step offsets of the normalized scene (first offset is
/// relative to the origin, i.e. the target's last observed position).
Tensor gt_offsets(const Scene& normalized_scene);

/// L = L_traj + alpha L_node; the node term is dropped when nothing was
/// masked.
Tensor model_loss(Graph& g, const ForwardResult& result, const Tensor& gt, const ModelConfig& config);

/// Decoded trajectory: per-step offsets in the normalized frame plus the
/// absolute positions obtained by cumulative summation and denormalization.
struct Prediction {
  std::vector<Point2> offsets;
  std::vector<Point2> absolute;
};

Prediction to_prediction(const ForwardResult& result, const Scene& normalized_scene);

}  // namespace polyvec
