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
#include <optional>
#include <string>
#include <vector>

#include "polyvec/geometry.hpp"

namespace polyvec {

enum class PolylineKind {
  kLaneBoundary = 0,
  kCrosswalk = 1,
  kStopSign = 2,
  kSpeedBump = 3,
  kAgentTrajectory = 4,
};

constexpr std::size_t kPolylineKindCount = 5;

std::string to_string(PolylineKind kind);
PolylineKind polyline_kind_from_string(const std::string& s);

/// Ordered control points approximating a map spline or an agent trajectory.
struct Polyline {
  int id = 0;
  PolylineKind kind = PolylineKind::kLaneBoundary;
  std::vector<Point2> points;
  /// Seconds per point; agent trajectories only, strictly increasing.
  std::vector<double> timestamps;
  /// Optional extra attribute reals (speed limit etc.), at most
  /// kExtraAttributes of them are carried into the node features.
  std::vector<double> attributes;
};

/// Attribute record layout for one vector node: one-hot over the five
/// polyline kinds, the vector's start timestamp (0 for map features), and
/// two spare attribute slots.
constexpr std::size_t kExtraAttributes = 2;
constexpr std::size_t kAttributeWidth = kPolylineKindCount + 1 + kExtraAttributes;
/// Full numeric input per node: start (2) + end (2) + attributes.
constexpr std::size_t kNodeInputWidth = 4 + kAttributeWidth;

/// One directed segment of a polyline. The polyline id is carried
/// structurally and is not part of the numeric features.
struct VectorNode {
  Point2 start;
  Point2 end;
  std::array<double, kAttributeWidth> attr{};
  int polyline_id = 0;
};

enum class SceneFrame { kRaw, kNormalized };

/// Pose of the target agent at its last observed step, in raw coordinates.
/// Stored on normalized scenes so the transform can be inverted.
struct ScenePose {
  Point2 translation;
  double heading = 0.0;
};

/// One prediction instance: map + agent polylines, the target agent, the
/// observation horizon and the future ground truth.
struct Scene {
  std::vector<Polyline> polylines;
  int target_id = 0;
  std::size_t observed_steps = 10;
  std::vector<Point2> future_gt;  // absolute coordinates, same frame as points
  SceneFrame frame = SceneFrame::kRaw;
  std::optional<ScenePose> pose;  // set iff frame == kNormalized

  const Polyline& target() const;
  std::size_t target_index() const;
};

/// Arc-length-uniform resampling by linear interpolation. The first and last
/// input points are always kept; single-point inputs pass through.
std::vector<Point2> sample_map_polyline(const std::vector<Point2>& points, double interval);

/// Resamples a timed trajectory onto the grid t = 0, dt, 2dt, ... up to the
/// last timestamp (no extrapolation) by linear-in-time interpolation.
Polyline sample_trajectory(const std::vector<Point2>& positions,
                           const std::vector<double>& timestamps, double dt = 0.1);

/// Connects neighboring points into vectors; n points yield max(n-1, 1)
/// vectors, a single point yields one degenerate vector with start == end.
std::vector<VectorNode> build_vectors(const Polyline& p);

/// Heading (radians) of the displacement between the last two observed
/// points; 0 when the agent is stationary (displacement < 1e-6 m).
double target_heading(const Polyline& target, std::size_t observed_steps);

/// Translates all coordinates so the target's last observed position is the
/// origin, then rotates by minus the target heading.
Scene normalize_scene(const Scene& s);

/// Inverse of normalize_scene using the stored pose.
Scene denormalize_scene(const Scene& s);

Point2 to_raw_frame(const Point2& p, const ScenePose& pose);
Point2 to_normalized_frame(const Point2& p, const ScenePose& pose);

/// Componentwise minimum of the start coordinates over a polyline's vectors;
/// the identifier kept with masked features.
Point2 polyline_identifier(const std::vector<VectorNode>& nodes);

}  // namespace polyvec
