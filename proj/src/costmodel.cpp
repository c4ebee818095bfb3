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

#include "polyvec/costmodel.hpp"

#include <utility>

#include "polyvec/errors.hpp"

namespace polyvec {

void CostReport::add(std::string name, double f, std::uint64_t p) {
  flops += f;
  params += p;
  breakdown.push_back({std::move(name), f, p});
}

CostReport count_params(const ModelConfig& cfg, std::size_t input_width) {
  cfg.validate();
  CostReport report;
  const std::uint64_t w = cfg.width;

  std::uint64_t in = input_width;
  for (std::size_t l = 0; l < cfg.subgraph_depth; ++l) {
    // weight + bias + layer-norm gamma/beta
    report.add("subgraph." + std::to_string(l), 0.0, in * w + w + w + w);
    in = 2 * w;
  }
  std::uint64_t gin = 2 * w + 2;  // polyline feature + identifier embedding
  for (std::size_t l = 0; l < cfg.global_depth; ++l) {
    report.add("global." + std::to_string(l), 0.0, 3 * gin * w);
    gin = w;
  }
  report.add("node_dec", 0.0, w * w + w + w * (2 * w) + 2 * w);
  return report;
}

CostReport vector_encoder_flops(const SceneStats& stats, const ModelConfig& cfg) {
  cfg.validate();
  CostReport report;
  const double n = static_cast<double>(stats.map_vectors + stats.agent_vectors);
  const double p = static_cast<double>(stats.map_polylines + stats.agent_polylines);
  const double w = static_cast<double>(cfg.width);

  double in = static_cast<double>(kNodeInputWidth);
  for (std::size_t l = 0; l < cfg.subgraph_depth; ++l) {
    // matmul (2 per multiply-add) + bias + layer norm + relu + maxpool
    const double layer = 2.0 * n * in * w + 4.0 * n * w;
    report.add("subgraph." + std::to_string(l), layer);
    in = 2.0 * w;
  }
  // final per-polyline pooling and L2 normalization
  report.add("polyline_pool", n * 2.0 * w + p * 2.0 * w);
  // identifier embedding: componentwise min over start coordinates
  report.add("identifier", 2.0 * n);

  double gin = 2.0 * w + 2.0;
  for (std::size_t l = 0; l < cfg.global_depth; ++l) {
    const double qkv = 3.0 * 2.0 * p * gin * w;
    const double scores = 2.0 * p * p * w;
    const double softmax = 3.0 * p * p;
    const double attend = 2.0 * p * p * w;
    report.add("global." + std::to_string(l), qkv + scores + softmax + attend);
    gin = w;
  }

  // Coordinates are renormalized and features recomputed per target: one
  // trailing multiplication keeps the total exactly linear in n_targets.
  const double targets = static_cast<double>(stats.n_targets);
  report.flops *= targets;
  for (CostItem& item : report.breakdown) item.flops *= targets;
  return report;
}

CostReport convnet_flops(double resolution, std::size_t kernel, const ConvNetArch& arch) {
  if (resolution <= 0.0) throw parameter_error("convnet_flops: resolution must be positive");
  if (kernel < 1 || kernel % 2 == 0) throw parameter_error("convnet_flops: kernel must be odd and >= 1");

  CostReport report;
  const auto conv = [&](const std::string& name, std::size_t k, std::size_t cin, std::size_t cout,
                        double out_side) {
    const double elems = out_side * out_side * static_cast<double>(cout);
    const double flops = 2.0 * static_cast<double>(k) * static_cast<double>(k) *
                             static_cast<double>(cin) * elems +
                         2.0 * elems;  // batch norm + relu, 1 FLOP/element each
    const std::uint64_t params =
        static_cast<std::uint64_t>(k) * k * cin * cout + 2ull * cout;  // conv + BN
    report.add(name, flops, params);
  };

  // Stem keeps its 7x7 kernel; the study varies only the residual convs.
  double side = resolution / 2.0;
  conv("stem", arch.stem_kernel, arch.input_channels, arch.stem_channels, side);
  side /= 2.0;
  report.add("maxpool", 9.0 * side * side * static_cast<double>(arch.stem_channels));
  conv("transition", 1, arch.stem_channels, arch.trunk_channels, side);

  const std::size_t c = arch.trunk_channels;
  for (std::size_t s = 0; s < arch.stages; ++s) {
    if (s > 0) {
      side /= 2.0;
      conv("stage" + std::to_string(s + 1) + ".shortcut", 1, c, c, side);
    }
    for (std::size_t b = 0; b < arch.blocks_per_stage; ++b) {
      const std::string base = "stage" + std::to_string(s + 1) + ".block" + std::to_string(b + 1);
      conv(base + ".conv1", kernel, c, c, side);
      conv(base + ".conv2", kernel, c, c, side);
    }
  }
  return report;
}

}  // namespace polyvec
