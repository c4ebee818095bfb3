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

#include <cstdint>
#include <string>

#include "polyvec/model.hpp"
#include "polyvec/train.hpp"

namespace polyvec {

/// Checkpoint metadata next to the parameter blobs.
struct Checkpoint {
  ModelConfig config;
  std::uint64_t seed = 0;
  std::size_t epoch = 0;  // number of completed epochs
};

/// JSON file: header (config, shapes, seed, epoch) plus base64 blobs of
/// little-endian 64-bit floats per named parameter and Adam moment.
/// load(save(x)) == x bitwise.
void save_checkpoint(const std::string& path, const ModelParams& params, const AdamState& adam,
                     const Checkpoint& meta);

struct LoadedCheckpoint {
  ModelParams params;
  AdamState adam;
  Checkpoint meta;
};

LoadedCheckpoint load_checkpoint(const std::string& path);

}  // namespace polyvec
