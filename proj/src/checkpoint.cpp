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

#include "polyvec/checkpoint.hpp"

#include <fstream>

#include <json.hpp>

#include "polyvec/base64.hpp"
#include "polyvec/errors.hpp"

namespace polyvec {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

json config_to_json(const ModelConfig& c) {
  return json{{"subgraph_depth", c.subgraph_depth}, {"global_depth", c.global_depth},
              {"width", c.width},                   {"future_steps", c.future_steps},
              {"alpha", c.alpha},                   {"mask_prob", c.mask_prob},
              {"huber_delta", c.huber_delta},       {"attention_scaled", c.attention_scaled}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.subgraph_depth = j.at("subgraph_depth").get<std::size_t>();
  c.global_depth = j.at("global_depth").get<std::size_t>();
  c.width = j.at("width").get<std::size_t>();
  c.future_steps = j.at("future_steps").get<std::size_t>();
  c.alpha = j.at("alpha").get<double>();
  c.mask_prob = j.at("mask_prob").get<double>();
  c.huber_delta = j.at("huber_delta").get<double>();
  c.attention_scaled = j.at("attention_scaled").get<bool>();
  return c;
}

}  // namespace

void save_checkpoint(const std::string& path, const ModelParams& params, const AdamState& adam,
                     const Checkpoint& meta) {
  json j;
  j["format"] = kFormatVersion;
  j["config"] = config_to_json(meta.config);
  j["seed"] = meta.seed;
  j["epoch"] = meta.epoch;
  j["adam_step"] = adam.step;
  j["params"] = json::array();
  const auto& tensors = params.tensors();
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    json p;
    p["name"] = tensors[i].name;
    p["shape"] = tensors[i].tensor.shape();
    p["data"] = doubles_to_base64(tensors[i].tensor.values());
    if (i < adam.m.size()) {
      p["adam_m"] = doubles_to_base64(adam.m[i]);
      p["adam_v"] = doubles_to_base64(adam.v[i]);
    }
    j["params"].push_back(std::move(p));
  }
  std::ofstream out(path);
  if (!out) throw file_error("cannot write checkpoint: " + path);
  out << j.dump(2) << "\n";
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw file_error("cannot open checkpoint: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw data_error("checkpoint " + path + ": invalid JSON: " + e.what());
  }
  if (j.value("format", 0) != kFormatVersion) {
    throw data_error("checkpoint " + path + ": unsupported format");
  }

  Checkpoint meta;
  meta.config = config_from_json(j.at("config"));
  meta.seed = j.at("seed").get<std::uint64_t>();
  meta.epoch = j.at("epoch").get<std::size_t>();

  // Allocate with the right shapes, then overwrite every value bitwise.
  Rng scratch(0);
  ModelParams params(meta.config, scratch);
  AdamState adam = AdamState::for_params(params);
  adam.step = j.at("adam_step").get<std::size_t>();

  const json& plist = j.at("params");
  if (plist.size() != params.tensors().size()) {
    throw data_error("checkpoint " + path + ": expected " +
                     std::to_string(params.tensors().size()) + " tensors, found " +
                     std::to_string(plist.size()));
  }
  for (std::size_t i = 0; i < plist.size(); ++i) {
    const json& p = plist[i];
    NamedParam& dst = params.tensors()[i];
    if (p.at("name").get<std::string>() != dst.name) {
      throw data_error("checkpoint " + path + ": tensor order mismatch at " + dst.name);
    }
    std::vector<double> values = base64_to_doubles(p.at("data").get<std::string>());
    if (values.size() != dst.tensor.size()) {
      throw data_error("checkpoint " + path + ": blob size mismatch for " + dst.name);
    }
    dst.tensor.values() = std::move(values);
    if (p.contains("adam_m")) {
      adam.m[i] = base64_to_doubles(p.at("adam_m").get<std::string>());
      adam.v[i] = base64_to_doubles(p.at("adam_v").get<std::string>());
      if (adam.m[i].size() != dst.tensor.size() || adam.v[i].size() != dst.tensor.size()) {
        throw data_error("checkpoint " + path + ": adam blob size mismatch for " + dst.name);
      }
    }
  }
  return {std::move(params), std::move(adam), meta};
}

}  // namespace polyvec
