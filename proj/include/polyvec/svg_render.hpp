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

/// Scene visualization: map features grey, non-target agents green, ground
/// truth pink, the predicted trajectory blue, and per-polyline attention
/// painted as red intensity. One <path class="polyline"> per scene polyline.
std::string render_scene_svg(const Scene& scene, const std::vector<Point2>& prediction,
                             const std::vector<double>& attention);

}  // namespace polyvec
