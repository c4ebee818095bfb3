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

#include "polyvec/scene_io.hpp"

#include <fstream>

#include <json.hpp>

#include "polyvec/errors.hpp"

namespace polyvec {

using nlohmann::json;

namespace {

json points_to_json(const std::vector<Point2>& pts) {
  json arr = json::array();
  for (const Point2& p : pts) arr.push_back({p.x, p.y});
  return arr;
}

std::vector<Point2> points_from_json(const json& arr) {
  std::vector<Point2> out;
  out.reserve(arr.size());
  for (const json& p : arr) {
    if (!p.is_array() || p.size() != 2) throw data_error("scene: point must be [x, y]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

}  // namespace

std::string scene_to_json_line(const Scene& scene) {
  json j;
  j["polylines"] = json::array();
  for (const Polyline& p : scene.polylines) {
    json pj;
    pj["id"] = p.id;
    pj["kind"] = to_string(p.kind);
    pj["points"] = points_to_json(p.points);
    if (!p.timestamps.empty()) pj["timestamps"] = p.timestamps;
    if (!p.attributes.empty()) pj["attributes"] = p.attributes;
    j["polylines"].push_back(std::move(pj));
  }
  j["target_id"] = scene.target_id;
  j["observed_steps"] = scene.observed_steps;
  j["future_gt"] = points_to_json(scene.future_gt);
  return j.dump();
}

Scene scene_from_json_line(const std::string& line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw data_error(std::string("scene: invalid JSON: ") + e.what());
  }
  Scene s;
  if (!j.contains("polylines") || !j["polylines"].is_array()) {
    throw data_error("scene: missing polylines array");
  }
  for (const json& pj : j["polylines"]) {
    Polyline p;
    p.id = pj.at("id").get<int>();
    p.kind = polyline_kind_from_string(pj.at("kind").get<std::string>());
    p.points = points_from_json(pj.at("points"));
    if (pj.contains("timestamps")) p.timestamps = pj["timestamps"].get<std::vector<double>>();
    if (pj.contains("attributes")) p.attributes = pj["attributes"].get<std::vector<double>>();
    if (p.points.empty()) throw data_error("scene: polyline without points");
    s.polylines.push_back(std::move(p));
  }
  s.target_id = j.at("target_id").get<int>();
  s.observed_steps = j.at("observed_steps").get<std::size_t>();
  if (j.contains("future_gt")) s.future_gt = points_from_json(j["future_gt"]);
  s.target_index();  // validates the target exists and is a trajectory
  return s;
}

std::vector<Scene> read_scenes(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw file_error("cannot open scene file: " + path);
  std::vector<Scene> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(scene_from_json_line(line));
    } catch (const error& e) {
      throw data_error(path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void write_scenes(const std::string& path, const std::vector<Scene>& scenes) {
  std::ofstream out(path);
  if (!out) throw file_error("cannot write scene file: " + path);
  for (const Scene& s : scenes) out << scene_to_json_line(s) << "\n";
}

}  // namespace polyvec
