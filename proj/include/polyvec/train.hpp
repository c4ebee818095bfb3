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
#include <iosfwd>
#include <string>
#include <vector>

#include "polyvec/model.hpp"
#include "polyvec/scene.hpp"

namespace polyvec {

struct TrainConfig {
  double initial_lr = 1e-3;
  double decay_factor = 0.3;
  std::size_t decay_every = 5;  // epochs
  std::size_t epochs = 25;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;

  void validate() const;
};

/// Step-decayed learning rate: initial_lr * decay_factor^floor(epoch / decay_every).
double lr_at(std::size_t epoch, const TrainConfig& cfg);

/// Adam first/second moments, one flat buffer per parameter tensor in
/// registration order.
struct AdamState {
  std::vector<std::vector<double>> m;
  std::vector<std::vector<double>> v;
  std::size_t step = 0;

  static AdamState for_params(const ModelParams& params);
};

/// Standard Adam update with bias correction. grads holds one flat buffer
/// per parameter tensor, shapes mirroring the parameters.
void adam_step(ModelParams& params, const std::vector<std::vector<double>>& grads,
               AdamState& state, double lr, const TrainConfig& cfg);

struct EpochStats {
  std::size_t epoch = 0;
  double lr = 0.0;
  double train_loss = 0.0;
  double val_ade = 0.0;
  double val_de1 = 0.0;
  double val_de2 = 0.0;
  double val_de3 = 0.0;
  /// Held-out node-completion Huber loss under a fixed per-scene mask.
  double val_node_loss = 0.0;
};

std::string history_csv_header();
std::string history_csv_row(const EpochStats& s);

/// Optional output plumbing for a training run.
struct TrainIO {
  std::string history_csv;     // written when nonempty
  std::string checkpoint_dir;  // periodic + final checkpoints when nonempty
  std::size_t checkpoint_every = 5;
  std::ostream* log = nullptr;
};

struct TrainResult {
  ModelParams params;
  AdamState adam;
  std::vector<EpochStats> history;
};

/// Trains a fresh model. Batches run forward(train-with-mask) -> loss ->
/// backward; gradients are averaged over the batch and reduced in element
/// order, so serial and parallel execution agree bitwise. Evaluation uses
/// inference mode. Fully reproducible for a fixed seed.
TrainResult train(const std::vector<Scene>& train_scenes, const std::vector<Scene>& val_scenes,
                  const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                  const TrainIO* io = nullptr);

/// Continues training from existing parameters and optimizer state,
/// starting at start_epoch (exclusive upper bound stays train_cfg.epochs).
TrainResult train_resume(ModelParams params, AdamState adam, std::size_t start_epoch,
                         const std::vector<Scene>& train_scenes,
                         const std::vector<Scene>& val_scenes, const TrainConfig& train_cfg,
                         const TrainIO* io = nullptr);

}  // namespace polyvec
