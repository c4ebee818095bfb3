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

#include "polyvec/scenegen.hpp"

#include <algorithm>
#include <cmath>

#include "polyvec/errors.hpp"
#include "polyvec/rng.hpp"

namespace polyvec {

namespace {

constexpr double kDt = 0.1;          // s between trajectory samples
constexpr double kLaneWidth = 3.5;   // m
constexpr double kLaneSampling = 2.0;  // m between lane polyline points
constexpr double kLaneLead = 12.0;   // lane extends this far behind the start
constexpr double kLaneTail = 8.0;    // and this far past the future end
constexpr double kMaxSweep = 100.0 * 3.141592653589793 / 180.0;

// Piecewise line/arc curve, arc-length parameterized.
struct Segment {
  Point2 start;
  double heading = 0.0;
  double length = 0.0;
  double curvature = 0.0;  // 0 = straight, else 1/radius (signed, + = left)
};

struct Course {
  std::vector<Segment> segments;

  double total_length() const {
    double s = 0.0;
    for (const Segment& seg : segments) s += seg.length;
    return s;
  }

  void locate(double s, Point2* point, double* heading) const {
    double remaining = std::max(s, 0.0);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const Segment& seg = segments[i];
      const bool last = i + 1 == segments.size();
      const double d = (remaining <= seg.length || last) ? remaining : seg.length;
      if (remaining <= seg.length || last) {
        if (seg.curvature == 0.0) {
          if (point) *point = seg.start + heading_dir(seg.heading) * d;
          if (heading) *heading = seg.heading;
        } else {
          const double k = seg.curvature;
          const double h0 = seg.heading, h1 = h0 + k * d;
          if (point) {
            *point = seg.start + Point2{(std::sin(h1) - std::sin(h0)) / k,
                                        (std::cos(h0) - std::cos(h1)) / k};
          }
          if (heading) *heading = h1;
        }
        return;
      }
      remaining -= seg.length;
    }
    if (point) *point = Point2{};
    if (heading) *heading = 0.0;
  }

  Point2 point_at(double s) const {
    Point2 p;
    locate(s, &p, nullptr);
    return p;
  }

  /// Parallel curve: point shifted along the left normal. Exact for both
  /// lines and arcs (concentric arc).
  Point2 offset_point(double s, double offset) const {
    Point2 p;
    double h = 0.0;
    locate(s, &p, &h);
    return p + heading_dir(h + 1.5707963267948966) * offset;
  }
};

std::vector<Point2> sample_course(const Course& course, double s_lo, double s_hi, double offset) {
  std::vector<Point2> raw;
  const double len = std::max(s_hi - s_lo, kLaneSampling);
  const auto steps = static_cast<std::size_t>(std::ceil(len / kLaneSampling));
  raw.reserve(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) {
    const double s = s_lo + len * static_cast<double>(i) / static_cast<double>(steps);
    raw.push_back(course.offset_point(s, offset));
  }
  return sample_map_polyline(raw, kLaneSampling);
}

void add_noise(std::vector<Point2>& pts, double std_dev, Rng& rng) {
  if (std_dev <= 0.0) return;
  for (Point2& p : pts) {
    p.x += rng.normal(0.0, std_dev);
    p.y += rng.normal(0.0, std_dev);
  }
}

Polyline make_trajectory(int id, const std::vector<Point2>& pts) {
  Polyline p;
  p.id = id;
  p.kind = PolylineKind::kAgentTrajectory;
  p.points = pts;
  p.timestamps.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) p.timestamps[i] = static_cast<double>(i) * kDt;
  return p;
}

double smooth01(double x) {
  x = std::clamp(x, 0.0, 1.0);
  return x * x * (3.0 - 2.0 * x);
}

}  // namespace

std::string to_string(ScenarioKind kind) {
  switch (kind) {
    case ScenarioKind::kStationary: return "stationary";
    case ScenarioKind::kStraight: return "straight";
    case ScenarioKind::kLeftTurn: return "left_turn";
    case ScenarioKind::kRightTurn: return "right_turn";
    case ScenarioKind::kLaneChange: return "lane_change";
  }
  throw data_error("unknown scenario kind");
}

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "stationary") return ScenarioKind::kStationary;
  if (s == "straight") return ScenarioKind::kStraight;
  if (s == "left_turn") return ScenarioKind::kLeftTurn;
  if (s == "right_turn") return ScenarioKind::kRightTurn;
  if (s == "lane_change") return ScenarioKind::kLaneChange;
  throw parameter_error("unknown scenario kind: " + s);
}

Scene generate(const ScenarioSpec& spec, GenDetails* details) {
  if (spec.observed_steps < 2) throw parameter_error("generate: observed_steps must be >= 2");
  if (spec.future_steps < 1) throw parameter_error("generate: future_steps must be >= 1");
  if (spec.noise_std < 0.0) throw parameter_error("generate: noise_std must be >= 0");

  Rng rng(Rng::derive_seed(spec.seed, 0x5ce2, static_cast<std::uint64_t>(spec.kind)));

  GenDetails det;
  det.speed = spec.kind == ScenarioKind::kStationary ? 0.0 : rng.uniform(5.0, 15.0);
  det.radius = rng.uniform(8.0, 30.0);
  det.heading = rng.uniform(0.0, 2.0 * 3.141592653589793);
  det.start = {rng.uniform(-200.0, 200.0), rng.uniform(-200.0, 200.0)};
  det.lane_change_duration = rng.uniform(2.0, 2.5);
  det.lane_offset = (rng.uniform() < 0.5 ? 1.0 : -1.0) * kLaneWidth;
  // Straight scenes stay constant-velocity (their future is exactly the
  // kinematic extrapolation); maneuver scenes may carry a slow lead.
  const bool brake_eligible = spec.n_other_agents >= 1 &&
                              (spec.kind == ScenarioKind::kLeftTurn ||
                               spec.kind == ScenarioKind::kRightTurn ||
                               spec.kind == ScenarioKind::kLaneChange);
  det.braking = brake_eligible && rng.uniform() < 0.5;
  det.lead_speed = det.speed * rng.uniform(0.4, 0.7);
  det.brake_ramp = rng.uniform(1.5, 2.5);
  det.headway = rng.uniform(1.1, 1.7);

  const double t_last = static_cast<double>(spec.observed_steps - 1) * kDt;
  const double future_horizon = static_cast<double>(spec.future_steps) * kDt;
  det.arc_start_s = det.speed * t_last;
  const double future_dist = det.speed * future_horizon;

  // Course: straight through the whole observation window; turns bend right
  // at the prediction boundary. The course parameter starts kLaneLead before
  // the target's position at t=0.
  Course course;
  const Point2 course_origin = det.start - heading_dir(det.heading) * kLaneLead;
  const double turn_sign = spec.kind == ScenarioKind::kLeftTurn    ? 1.0
                           : spec.kind == ScenarioKind::kRightTurn ? -1.0
                                                                   : 0.0;
  if (turn_sign != 0.0) {
    const double arc_len = std::min(future_dist + 1.0, det.radius * kMaxSweep);
    det.sweep = turn_sign * arc_len / det.radius;
    Segment lead{course_origin, det.heading, kLaneLead + det.arc_start_s, 0.0};
    Point2 arc_start;
    course.segments.push_back(lead);
    course.locate(lead.length, &arc_start, nullptr);
    Segment arc{arc_start, det.heading, arc_len, turn_sign / det.radius};
    course.segments.push_back(arc);
    Point2 exit_pt;
    {
      Course partial{{lead, arc}};
      double exit_heading = 0.0;
      partial.locate(lead.length + arc.length, &exit_pt, &exit_heading);
      course.segments.push_back({exit_pt, exit_heading, kLaneTail + future_dist, 0.0});
    }
  } else {
    course.segments.push_back(
        {course_origin, det.heading, kLaneLead + det.arc_start_s + future_dist + kLaneTail, 0.0});
  }

  // Arc-length distance driven by time t; braking ramps the speed linearly
  // from `speed` down to `lead_speed` across brake_ramp seconds, starting at
  // the prediction boundary.
  const auto distance_at = [&](double t) -> double {
    if (!det.braking || t <= t_last) return det.speed * t;
    const double tau = t - t_last;
    const double drop = det.speed - det.lead_speed;
    if (tau <= det.brake_ramp) {
      return det.speed * t_last + det.speed * tau - 0.5 * drop * tau * tau / det.brake_ramp;
    }
    const double ramp_dist = det.speed * det.brake_ramp - 0.5 * drop * det.brake_ramp;
    return det.speed * t_last + ramp_dist + det.lead_speed * (tau - det.brake_ramp);
  };

  const auto target_pos = [&](double t) -> Point2 {
    const double s = kLaneLead + distance_at(t);
    if (spec.kind == ScenarioKind::kLaneChange && t > t_last) {
      const double a = smooth01((t - t_last) / det.lane_change_duration);
      return course.offset_point(s, det.lane_offset * a);
    }
    return course.point_at(s);
  };

  Scene scene;
  scene.observed_steps = spec.observed_steps;
  scene.target_id = 0;

  std::vector<Point2> observed(spec.observed_steps);
  for (std::size_t k = 0; k < spec.observed_steps; ++k) {
    observed[k] = target_pos(static_cast<double>(k) * kDt);
  }
  add_noise(observed, spec.noise_std, rng);
  scene.polylines.push_back(make_trajectory(0, observed));

  scene.future_gt.resize(spec.future_steps);
  for (std::size_t j = 1; j <= spec.future_steps; ++j) {
    scene.future_gt[j - 1] = target_pos(t_last + static_cast<double>(j) * kDt);
  }

  // Other agents: the first one leads the target down its own future path at
  // a short headway, so its observed track reveals the upcoming maneuver; the
  // rest drive parallel lanes at constant speed.
  int next_id = 1;
  const double s_total = course.total_length();
  for (std::size_t a = 0; a < spec.n_other_agents; ++a) {
    std::vector<Point2> pts(spec.observed_steps);
    if (a == 0 && spec.kind != ScenarioKind::kStationary) {
      if (det.braking) {
        // slow lead ahead on the target's course; its speed and gap are the
        // only evidence of the upcoming deceleration
        for (std::size_t k = 0; k < spec.observed_steps; ++k) {
          const double s = kLaneLead + det.speed * det.headway +
                           det.lead_speed * static_cast<double>(k) * kDt;
          pts[k] = course.point_at(s);
        }
      } else {
        // lead traces the target's own future path at a short time headway
        for (std::size_t k = 0; k < spec.observed_steps; ++k) {
          pts[k] = target_pos(static_cast<double>(k) * kDt + det.headway);
        }
      }
    } else {
      const double lane =
          (a % 2 == 0 ? 1.0 : -1.0) * kLaneWidth * static_cast<double>(a / 2 + 2);
      const double v = rng.uniform(5.0, 15.0);
      const double s0 = rng.uniform(0.0, std::max(s_total - v * t_last, 1.0));
      for (std::size_t k = 0; k < spec.observed_steps; ++k) {
        pts[k] = course.offset_point(s0 + v * static_cast<double>(k) * kDt, lane);
      }
    }
    add_noise(pts, spec.noise_std, rng);
    scene.polylines.push_back(make_trajectory(next_id++, pts));
  }

  // Map features. The primary lane polyline traces the course the target
  // actually follows; extra slots fill with parallel lanes and point/polygon
  // features.
  const double s_lo = 0.0;
  const double s_hi = s_total;
  std::size_t emitted = 0;
  const auto add_map = [&](Polyline p) {
    p.id = next_id++;
    scene.polylines.push_back(std::move(p));
    ++emitted;
  };
  const auto add_lane = [&](double offset) {
    Polyline lane;
    lane.kind = PolylineKind::kLaneBoundary;
    lane.points = sample_course(course, s_lo, s_hi, offset);
    add_map(std::move(lane));
  };
  // Slot layout: the course center first, then its two boundaries (masked
  // lane features stay reconstructable from their siblings), then point and
  // polygon features, then parallel lane centers further out.
  int side = 1;
  double off = kLaneWidth;
  while (emitted < spec.n_map_polylines) {
    const std::size_t slot = emitted;
    if (slot == 0) {
      add_lane(0.0);
      continue;
    }
    if (slot == 1 && spec.kind == ScenarioKind::kLaneChange) {
      add_lane(det.lane_offset);  // the lane the target merges into
      continue;
    }
    if (slot == 1) {
      add_lane(kLaneWidth / 2.0);
      continue;
    }
    if (slot == 2) {
      add_lane(spec.kind == ScenarioKind::kLaneChange ? det.lane_offset / 2.0 : -kLaneWidth / 2.0);
      continue;
    }
    if (slot == 3) {
      // Crosswalk polygon ahead of the target.
      const Point2 c = course.offset_point(kLaneLead + det.arc_start_s + 6.0, 0.0);
      Polyline cw;
      cw.kind = PolylineKind::kCrosswalk;
      cw.points = {c + Point2{-1.5, -1.5}, c + Point2{1.5, -1.5}, c + Point2{1.5, 1.5},
                   c + Point2{-1.5, 1.5}, c + Point2{-1.5, -1.5}};
      add_map(std::move(cw));
      continue;
    }
    if (slot == 4) {
      Polyline sign;
      sign.kind = PolylineKind::kStopSign;
      sign.points = {course.offset_point(kLaneLead + det.arc_start_s + 4.0, kLaneWidth)};
      add_map(std::move(sign));
      continue;
    }
    if (slot == 5) {
      Polyline bump;
      bump.kind = PolylineKind::kSpeedBump;
      const double s = kLaneLead + 2.0;
      bump.points = {course.offset_point(s, -kLaneWidth / 2), course.offset_point(s, kLaneWidth / 2)};
      add_map(std::move(bump));
      continue;
    }
    const double lane_off = static_cast<double>(side) * off;
    if (std::abs(lane_off - det.lane_offset) > 0.1 || spec.kind != ScenarioKind::kLaneChange) {
      add_lane(lane_off);
    } else {
      ++emitted;  // slot already provided by the lane-change target lane
    }
    if (side == 1) {
      side = -1;
    } else {
      side = 1;
      off += kLaneWidth;
    }
  }

  if (details != nullptr) *details = det;
  return scene;
}

std::vector<Scene> generate_dataset(std::size_t n, const KindWeights& mix, std::uint64_t seed,
                                    const ScenarioSpec& base) {
  double total = 0.0;
  for (double w : mix) {
    if (w < 0.0) throw parameter_error("generate_dataset: negative mix weight");
    total += w;
  }
  if (total <= 0.0) throw parameter_error("generate_dataset: mix weights sum to zero");

  std::vector<Scene> scenes;
  scenes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(Rng::derive_seed(seed, 0xd5e7, i));
    const double u = rng.uniform(0.0, total);
    double acc = 0.0;
    std::size_t kind = 0;
    for (std::size_t k = mix.size(); k-- > 0;) {
      if (mix[k] > 0.0) {
        kind = k;  // fallback for boundary rounding
        break;
      }
    }
    for (std::size_t k = 0; k < mix.size(); ++k) {
      acc += mix[k];
      if (u < acc) {
        kind = k;
        break;
      }
    }
    ScenarioSpec spec = base;
    spec.kind = static_cast<ScenarioKind>(kind);
    spec.seed = Rng::derive_seed(seed, 0x5eed, i);
    scenes.push_back(generate(spec));
  }
  return scenes;
}

}  // namespace polyvec
