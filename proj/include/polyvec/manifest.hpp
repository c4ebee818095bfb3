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
#include <map>
#include <string>
#include <vector>

namespace polyvec {

/// Git-style blob hash: SHA-1 of "blob <size>\0" + content, hex encoded.
std::string git_blob_hash(const std::string& content);
std::string git_blob_hash_file(const std::string& path);

/// Run provenance written next to every artifact. Reruns with an identical
/// manifest reproduce the outputs bitwise.
struct RunManifest {
  std::string command;                        // subcommand name
  std::map<std::string, std::string> config;  // flag snapshot
  std::uint64_t seed = 0;
  std::map<std::string, std::string> inputs;  // path -> content hash
  std::vector<std::string> outputs;           // produced paths

  std::string to_json() const;
  void write(const std::string& path) const;
};

}  // namespace polyvec
