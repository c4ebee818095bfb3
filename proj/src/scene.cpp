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

#include "polyvec/scene.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "polyvec/errors.hpp"

namespace polyvec {

std::string to_string(PolylineKind kind) {
  switch (kind) {
    case PolylineKind::kLaneBoundary: return "lane_boundary";
    case PolylineKind::kCrosswalk: return "crosswalk";
    case PolylineKind::kStopSign: return "stop_sign";
    case PolylineKind::kSpeedBump: return "speed_bump";
    case PolylineKind::kAgentTrajectory: return "agent_trajectory";
  }
  throw data_error("unknown polyline kind");
}

PolylineKind polyline_kind_from_string(const std::string& s) {
  if (s == "lane_boundary") return PolylineKind::kLaneBoundary;
  if (s == "crosswalk") return PolylineKind::kCrosswalk;
  if (s == "stop_sign") return PolylineKind::kStopSign;
  if (s == "speed_bump") return PolylineKind::kSpeedBump;
  if (s == "agent_trajectory") return PolylineKind::kAgentTrajectory;
  throw data_error("unknown polyline kind: " + s);
}

const Polyline& Scene::target() const { return polylines[target_index()]; }

std::size_t Scene::target_index() const {
  for (std::size_t i = 0; i < polylines.size(); ++i) {
    if (polylines[i].id == target_id) {
      if (polylines[i].kind != PolylineKind::kAgentTrajectory) {
        throw data_error("target polyline " + std::to_string(target_id) + " is not an agent trajectory");
      }
      return i;
    }
  }
  throw data_error("target polyline " + std::to_string(target_id) + " not found");
}

std::vector<Point2> sample_map_polyline(const std::vector<Point2>& points, double interval) {
  if (interval <= 0.0) throw parameter_error("sample_map_polyline: interval must be positive");
  if (points.empty()) throw data_error("sample_map_polyline: empty polyline");
  if (points.size() == 1) return points;

  std::vector<double> cum(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    cum[i] = cum[i - 1] + distance(points[i - 1], points[i]);
  }
  const double total = cum.back();
  if (total <= 0.0) return {points.front(), points.back()};

  const auto segments =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(total / interval - 1e-9)));
  const double spacing = total / static_cast<double>(segments);

  std::vector<Point2> out;
  out.reserve(segments + 1);
  out.push_back(points.front());
  std::size_t seg = 0;
  for (std::size_t k = 1; k < segments; ++k) {
    const double s = spacing * static_cast<double>(k);
    while (seg + 2 < points.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double t = len > 0.0 ? (s - cum[seg]) / len : 0.0;
    out.push_back(points[seg] + (points[seg + 1] - points[seg]) * t);
  }
  out.push_back(points.back());
  return out;
}

Polyline sample_trajectory(const std::vector<Point2>& positions,
                           const std::vector<double>& timestamps, double dt) {
  if (dt <= 0.0) throw parameter_error("sample_trajectory: dt must be positive");
  if (positions.empty() || positions.size() != timestamps.size()) {
    throw data_error("sample_trajectory: need matching nonempty positions and timestamps");
  }
  for (std::size_t i = 1; i < timestamps.size(); ++i) {
    if (timestamps[i] <= timestamps[i - 1]) {
      throw data_error("sample_trajectory: timestamps must be strictly increasing");
    }
  }
  const double t_first = timestamps.front();
  const double t_last = timestamps.back();
  const auto k0 = static_cast<long long>(std::ceil(t_first / dt - 1e-9));
  const auto k1 = static_cast<long long>(std::floor(t_last / dt + 1e-9));
  if (k0 > k1) throw data_error("sample_trajectory: trajectory spans no grid point");

  Polyline out;
  out.kind = PolylineKind::kAgentTrajectory;
  if (positions.size() == 1) {
    out.points.push_back(positions.front());
    out.timestamps.push_back(static_cast<double>(k0) * dt);
    return out;
  }
  std::size_t seg = 0;
  for (long long k = k0; k <= k1; ++k) {
    const double t = static_cast<double>(k) * dt;
    while (seg + 2 < timestamps.size() && timestamps[seg + 1] < t) ++seg;
    const double span = timestamps[seg + 1] - timestamps[seg];
    double a = (t - timestamps[seg]) / span;
    a = std::clamp(a, 0.0, 1.0);
    out.points.push_back(positions[seg] + (positions[seg + 1] - positions[seg]) * a);
    out.timestamps.push_back(t);
  }
  return out;
}

std::vector<VectorNode> build_vectors(const Polyline& p) {
  if (p.points.empty()) throw data_error("build_vectors: polyline has no points");
  std::array<double, kAttributeWidth> base{};
  base[static_cast<std::size_t>(p.kind)] = 1.0;
  for (std::size_t i = 0; i < kExtraAttributes && i < p.attributes.size(); ++i) {
    base[kPolylineKindCount + 1 + i] = p.attributes[i];
  }

  std::vector<VectorNode> nodes;
  const std::size_t count = std::max<std::size_t>(p.points.size() - 1, 1);
  nodes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    VectorNode v;
    v.start = p.points[i];
    v.end = p.points[std::min(i + 1, p.points.size() - 1)];
    v.attr = base;
    if (p.kind == PolylineKind::kAgentTrajectory && i < p.timestamps.size()) {
      v.attr[kPolylineKindCount] = p.timestamps[i];
    }
    v.polyline_id = p.id;
    nodes.push_back(v);
  }
  return nodes;
}

double target_heading(const Polyline& target, std::size_t observed_steps) {
  const std::size_t n = std::min(observed_steps, target.points.size());
  if (n < 2) throw data_error("target_heading: need at least 2 observed points");
  const Point2 d = target.points[n - 1] - target.points[n - 2];
  if (norm(d) < 1e-6) return 0.0;  // stationary: keep the raw axes
  return std::atan2(d.y, d.x);
}

Point2 to_normalized_frame(const Point2& p, const ScenePose& pose) {
  return rotate(p - pose.translation, -pose.heading);
}

Point2 to_raw_frame(const Point2& p, const ScenePose& pose) {
  return rotate(p, pose.heading) + pose.translation;
}

Scene normalize_scene(const Scene& s) {
  if (s.frame != SceneFrame::kRaw) throw state_error("normalize_scene: scene is already normalized");
  const Polyline& target = s.target();
  const std::size_t last = std::min(s.observed_steps, target.points.size()) - 1;
  ScenePose pose;
  pose.translation = target.points[last];
  pose.heading = target_heading(target, s.observed_steps);

  Scene out = s;
  for (Polyline& p : out.polylines) {
    for (Point2& pt : p.points) pt = to_normalized_frame(pt, pose);
  }
  for (Point2& pt : out.future_gt) pt = to_normalized_frame(pt, pose);
  out.frame = SceneFrame::kNormalized;
  out.pose = pose;
  return out;
}

Scene denormalize_scene(const Scene& s) {
  if (s.frame != SceneFrame::kNormalized || !s.pose.has_value()) {
    throw state_error("denormalize_scene: scene is not normalized");
  }
  Scene out = s;
  for (Polyline& p : out.polylines) {
    for (Point2& pt : p.points) pt = to_raw_frame(pt, *s.pose);
  }
  for (Point2& pt : out.future_gt) pt = to_raw_frame(pt, *s.pose);
  out.frame = SceneFrame::kRaw;
  out.pose.reset();
  return out;
}

Point2 polyline_identifier(const std::vector<VectorNode>& nodes) {
  if (nodes.empty()) throw data_error("polyline_identifier: no vectors");
  Point2 mn = nodes.front().start;
  for (const VectorNode& v : nodes) {
    mn.x = std::min(mn.x, v.start.x);
    mn.y = std::min(mn.y, v.start.y);
  }
  return mn;
}

}  // namespace polyvec
