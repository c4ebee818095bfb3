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

#include "polyvec/svg_render.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

namespace polyvec {

namespace {

struct Bounds {
  double min_x = 0.0, min_y = 0.0, max_x = 1.0, max_y = 1.0;
  bool seeded = false;

  void include(const Point2& p) {
    if (!seeded) {
      min_x = max_x = p.x;
      min_y = max_y = p.y;
      seeded = true;
      return;
    }
    min_x = std::min(min_x, p.x);
    max_x = std::max(max_x, p.x);
    min_y = std::min(min_y, p.y);
    max_y = std::max(max_y, p.y);
  }
};

std::string path_data(const std::vector<Point2>& pts) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  for (std::size_t i = 0; i < pts.size(); ++i) {
    os << (i == 0 ? "M" : " L") << pts[i].x << " " << pts[i].y;
  }
  return os.str();
}

std::string attention_color(double weight) {
  // Brighter red for higher attention.
  const int intensity = static_cast<int>(std::lround(255.0 * std::clamp(weight, 0.0, 1.0)));
  std::ostringstream os;
  os << "rgb(" << 255 << "," << (255 - intensity) << "," << (255 - intensity) << ")";
  return os.str();
}

}  // namespace

std::string render_scene_svg(const Scene& scene, const std::vector<Point2>& prediction,
                             const std::vector<double>& attention) {
  Bounds b;
  for (const Polyline& p : scene.polylines) {
    for (const Point2& pt : p.points) b.include(pt);
  }
  for (const Point2& pt : scene.future_gt) b.include(pt);
  for (const Point2& pt : prediction) b.include(pt);

  const double margin = 5.0;
  const double w = b.max_x - b.min_x + 2 * margin;
  const double h = b.max_y - b.min_y + 2 * margin;

  std::ostringstream os;
  os << std::fixed << std::setprecision(3);
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  // y axis flipped so north stays up
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << (b.min_x - margin) << " "
     << (-b.max_y - margin) << " " << w << " " << h << "\">\n";
  os << "<g transform=\"scale(1,-1)\">\n";

  double max_attention = 0.0;
  for (double a : attention) max_attention = std::max(max_attention, a);

  for (std::size_t i = 0; i < scene.polylines.size(); ++i) {
    const Polyline& p = scene.polylines[i];
    const bool is_target = p.id == scene.target_id;
    const bool is_agent = p.kind == PolylineKind::kAgentTrajectory;
    std::string stroke = is_target ? "black" : (is_agent ? "green" : "grey");
    double stroke_width = is_agent ? 0.5 : 0.3;
    if (i < attention.size() && max_attention > 0.0 && !is_target) {
      stroke = attention_color(attention[i] / max_attention);
      stroke_width = 0.6;
    }
    // Single-point features render as a dot: a degenerate path with a round cap.
    const std::vector<Point2>& pts = p.points;
    const std::string d =
        pts.size() == 1 ? path_data({pts[0], pts[0]}) : path_data(pts);
    os << "<path class=\"polyline\" d=\"" << d << "\" fill=\"none\" stroke=\"" << stroke
       << "\" stroke-width=\"" << (pts.size() == 1 ? 1.2 : stroke_width)
       << "\" stroke-linecap=\"round\"/>\n";
  }

  if (!scene.future_gt.empty()) {
    os << "<path class=\"gt\" d=\"" << path_data(scene.future_gt)
       << "\" fill=\"none\" stroke=\"#ff69b4\" stroke-width=\"0.5\"/>\n";
  }
  if (!prediction.empty()) {
    os << "<path class=\"pred\" d=\"" << path_data(prediction)
       << "\" fill=\"none\" stroke=\"blue\" stroke-width=\"0.5\" stroke-dasharray=\"1,0.5\"/>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

}  // namespace polyvec
