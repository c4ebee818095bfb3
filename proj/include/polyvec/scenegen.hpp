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
#include <cstdint>
#include <string>
#include <vector>

#include "polyvec/scene.hpp"

namespace polyvec {

enum class ScenarioKind {
  kStationary = 0,
  kStraight = 1,
  kLeftTurn = 2,
  kRightTurn = 3,
  kLaneChange = 4,
};

constexpr std::size_t kScenarioKindCount = 5;

std::string to_string(ScenarioKind kind);
ScenarioKind scenario_kind_from_string(const std::string& s);

/// One synthetic prediction scenario. Turn and lane-change futures are not
/// inferable from the observed kinematics alone (the maneuver starts at the
/// prediction boundary), so map context carries real information.
struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kStraight;
  std::size_t n_map_polylines = 4;
  std::size_t n_other_agents = 2;
  double noise_std = 0.05;  // observation noise, meters; future_gt stays exact
  std::uint64_t seed = 0;
  std::size_t observed_steps = 10;  // 1 s of history
  std::size_t future_steps = 30;    // 3 s to predict
};

/// Geometry actually drawn for a scenario; lets tests rebuild the ground
/// truth in closed form.
struct GenDetails {
  double speed = 0.0;       // m/s along the lane
  double radius = 0.0;      // turn radius, turns only
  double sweep = 0.0;       // signed arc angle actually driven through (rad)
  double heading = 0.0;     // initial course heading
  Point2 start;             // target position at t = 0 (noise-free)
  double arc_start_s = 0.0; // arc distance from the start to the turn entry
  double lane_change_duration = 0.0;  // s
  double lane_offset = 0.0;           // signed lateral shift of a lane change
  /// Car-following: in turn/lane-change scenes a slow lead vehicle may force
  /// the target to decelerate over the prediction window. The map cannot
  /// reveal this; the lead's observed speed and gap can.
  bool braking = false;
  double lead_speed = 0.0;   // lead (and final target) speed when braking
  double brake_ramp = 0.0;   // s to ramp from speed down to lead_speed
  double headway = 0.0;      // lead time gap, s
};

Scene generate(const ScenarioSpec& spec, GenDetails* details = nullptr);

/// Scenario-kind weights for dataset mixes, indexed by ScenarioKind.
using KindWeights = std::array<double, kScenarioKindCount>;

/// Deterministic for a fixed seed; each scene draws its own generator from
/// (seed, index), so generation is parallelizable by index.
std::vector<Scene> generate_dataset(std::size_t n, const KindWeights& mix, std::uint64_t seed,
                                    const ScenarioSpec& base = {});

}  // namespace polyvec
