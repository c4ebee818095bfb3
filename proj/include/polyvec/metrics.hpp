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
#include <string>
#include <vector>

#include "polyvec/model.hpp"
#include "polyvec/scene.hpp"
#include "polyvec/train.hpp"

namespace polyvec {

/// Fixed sampling interval: DE@1/2/3 s are future steps 10/20/30.
constexpr double kStepSeconds = 0.1;

/// Mean Euclidean distance over all steps.
double ade(const std::vector<Point2>& pred, const std::vector<Point2>& gt);

/// Euclidean distance at time t (seconds); t/dt must be a whole step within
/// the horizon.
double de_at(const std::vector<Point2>& pred, const std::vector<Point2>& gt, double t_seconds,
             double dt = kStepSeconds);

/// Extrapolates the last observed per-step displacement.
std::vector<Point2> constant_velocity(const std::vector<Point2>& observed,
                                      std::size_t future_steps, double dt = kStepSeconds);

struct EvalReport {
  double ade = 0.0;
  double de1 = 0.0;
  double de2 = 0.0;
  double de3 = 0.0;
  std::size_t n_scenes = 0;
};

/// Inference-mode evaluation of a trained model over raw scenes.
EvalReport evaluate_model(const ModelParams& params, const std::vector<Scene>& scenes);

/// Constant-velocity baseline over the same scenes.
EvalReport evaluate_constant_velocity(const std::vector<Scene>& scenes);

/// Which input polylines an ablation arm is allowed to see.
enum class ContextArm {
  kTargetOnly,  // only the target history ("none" context)
  kMap,         // target history + map features
  kMapAgents,   // everything
};

std::string to_string(ContextArm arm);
ContextArm context_arm_from_string(const std::string& s);

struct AblationArm {
  ContextArm context = ContextArm::kMapAgents;
  bool node_completion = true;
};

struct AblationRow {
  AblationArm arm;
  EvalReport report;
};

/// Drops polylines the arm may not see (the target is always kept).
Scene filter_context(const Scene& scene, ContextArm arm);

/// Trains one model per arm with a shared seed and identical data (filtered
/// per arm) and evaluates each on the filtered held-out set.
std::vector<AblationRow> ablate(const std::vector<Scene>& train_scenes,
                                const std::vector<Scene>& val_scenes,
                                const std::vector<AblationArm>& arms,
                                const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                                std::ostream* log = nullptr);

std::string format_eval_table(const std::vector<AblationRow>& rows);
std::string ablation_csv(const std::vector<AblationRow>& rows);

}  // namespace polyvec
