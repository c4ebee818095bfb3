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

#include <string>
#include <vector>

#include "polyvec/scene.hpp"

namespace polyvec {

/// Scene files are JSON Lines, one scene per line:
///   {"polylines": [{"id", "kind", "points": [[x, y], ...],
///                   "timestamps"?, "attributes"?}],
///    "target_id", "observed_steps", "future_gt"}
/// Coordinates are meters in the raw frame.
std::string scene_to_json_line(const Scene& scene);
Scene scene_from_json_line(const std::string& line);

std::vector<Scene> read_scenes(const std::string& path);
void write_scenes(const std::string& path, const std::vector<Scene>& scenes);

}  // namespace polyvec
