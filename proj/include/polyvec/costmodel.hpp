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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "polyvec/model.hpp"

namespace polyvec {

/// Average per-scene input sizes used for FLOPs accounting. Defaults are
/// typical driving-scene statistics (17 map polylines / 205 vectors, 59
/// agent polylines / 590 vectors).
struct SceneStats {
  std::size_t map_polylines = 17;
  std::size_t map_vectors = 205;
  std::size_t agent_polylines = 59;
  std::size_t agent_vectors = 590;
  std::size_t n_targets = 1;
};

struct CostItem {
  std::string name;
  double flops = 0.0;
  std::uint64_t params = 0;
};

/// FLOPs count one multiply-add as 2 FLOPs; pooling, normalization and
/// activations count 1 FLOP per element touched.
struct CostReport {
  double flops = 0.0;
  std::uint64_t params = 0;
  std::vector<CostItem> breakdown;

  void add(std::string name, double f, std::uint64_t p = 0);
};

/// Exact scalar count of the encoder: polyline subgraph, global graph and
/// node-completion decoder. The trajectory (prediction) decoder is excluded
/// from cost accounting; the count matches the allocator exactly for the
/// remaining tensors.
CostReport count_params(const ModelConfig& cfg, std::size_t input_width = kNodeInputWidth);

/// Analytic encoder FLOPs for one scene. Coordinates are renormalized and
/// features recomputed per predicting target, so the total is exactly
/// per-target x n_targets (and exactly linear in every vector count).
CostReport vector_encoder_flops(const SceneStats& stats, const ModelConfig& cfg);

/// Slim ResNet-18-style channel table for the rasterized baseline. The
/// variable kernel applies only to the residual 3x3 convolutions; the 7x7
/// stem and the 1x1 downsampling projections keep their size, which is what
/// produces the sub-quadratic parameter growth with kernel size.
struct ConvNetArch {
  std::size_t input_channels = 30;  // 10 stacked frames x 3
  std::size_t stem_channels = 64;
  std::size_t stem_kernel = 7;
  std::size_t trunk_channels = 32;
  std::size_t stages = 4;
  std::size_t blocks_per_stage = 2;
};

/// Layer-by-layer convolution FLOPs with stride-aware (real-valued) spatial
/// maps: FLOPs scale exactly quadratically with resolution, parameters do
/// not depend on it.
CostReport convnet_flops(double resolution, std::size_t kernel, const ConvNetArch& arch = {});

}  // namespace polyvec
