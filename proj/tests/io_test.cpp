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

#include <gtest/gtest.h>

#include <unistd.h>

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "polyvec/base64.hpp"
#include "polyvec/checkpoint.hpp"
#include "polyvec/errors.hpp"
#include "polyvec/manifest.hpp"
#include "polyvec/rng.hpp"
#include "polyvec/scene_io.hpp"
#include "polyvec/scenegen.hpp"
#include "polyvec/svg_render.hpp"
#include "polyvec/train.hpp"

namespace polyvec {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() : path_(fs::temp_directory_path() / ("polyvec_test_" + std::to_string(::getpid()))) {
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  fs::path path_;
};

TEST(Base64, KnownVectors) {
  const std::string man = "Man";
  EXPECT_EQ(base64_encode(reinterpret_cast<const std::uint8_t*>(man.data()), 3), "TWFu");
  EXPECT_EQ(base64_encode(reinterpret_cast<const std::uint8_t*>(man.data()), 2), "TWE=");
  EXPECT_EQ(base64_encode(reinterpret_cast<const std::uint8_t*>(man.data()), 1), "TQ==");
  EXPECT_EQ(base64_encode(nullptr, 0), "");
}

TEST(Base64, RoundTripRandomBlobs) {
  Rng rng(5);
  for (std::size_t len : {0u, 1u, 2u, 3u, 17u, 256u, 1000u}) {
    std::vector<std::uint8_t> data(len);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng.uniform_int(256));
    const std::string text = base64_encode(data.data(), data.size());
    EXPECT_EQ(base64_decode(text), data) << "len=" << len;
  }
}

TEST(Base64, RejectsMalformedInput) {
  EXPECT_THROW(base64_decode("abc"), data_error);     // not a multiple of 4
  EXPECT_THROW(base64_decode("a!=="), data_error);    // invalid character
  EXPECT_THROW(base64_decode("=AAA"), data_error);    // misplaced padding
}

TEST(Base64, DoubleBlobsAreBitExact) {
  Rng rng(7);
  std::vector<double> values;
  for (int i = 0; i < 64; ++i) values.push_back(rng.normal(0.0, 1e12));
  values.push_back(0.0);
  values.push_back(-0.0);
  values.push_back(1e-308);
  const std::vector<double> back = base64_to_doubles(doubles_to_base64(values));
  ASSERT_EQ(back.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    EXPECT_EQ(std::memcmp(&back[i], &values[i], sizeof(double)), 0) << i;
  }
}

TEST(SceneIo, JsonLineRoundTripIsExact) {
  ScenarioSpec spec;
  spec.kind = ScenarioKind::kLeftTurn;
  spec.noise_std = 0.13;
  spec.seed = 77;
  const Scene s = generate(spec);
  const std::string line = scene_to_json_line(s);
  const Scene back = scene_from_json_line(line);
  // serialized doubles use shortest round-trip formatting, so a second
  // serialization is bitwise identical
  EXPECT_EQ(scene_to_json_line(back), line);
  EXPECT_EQ(back.polylines.size(), s.polylines.size());
  EXPECT_EQ(back.observed_steps, s.observed_steps);
}

TEST(SceneIo, FileRoundTrip) {
  TempDir tmp;
  const auto scenes = generate_dataset(7, KindWeights{1, 1, 1, 1, 1}, 3);
  const std::string path = tmp.file("scenes.jsonl");
  write_scenes(path, scenes);
  const auto back = read_scenes(path);
  ASSERT_EQ(back.size(), scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    EXPECT_EQ(scene_to_json_line(back[i]), scene_to_json_line(scenes[i]));
  }
}

TEST(SceneIo, Errors) {
  EXPECT_THROW(read_scenes("/nonexistent/path.jsonl"), file_error);
  EXPECT_THROW(scene_from_json_line("{not json"), data_error);
  EXPECT_THROW(scene_from_json_line("{\"polylines\":[],\"target_id\":0,\"observed_steps\":2}"),
               data_error);  // target missing
}

TEST(Checkpoint, SaveLoadIsBitwiseIdentity) {
  TempDir tmp;
  ModelConfig cfg;
  cfg.width = 6;
  cfg.future_steps = 4;
  cfg.attention_scaled = true;
  Rng rng(11);
  ModelParams params(cfg, rng);
  AdamState adam = AdamState::for_params(params);
  // make the optimizer state nontrivial
  adam.step = 17;
  for (auto& m : adam.m) {
    for (double& v : m) v = rng.normal();
  }
  for (auto& v2 : adam.v) {
    for (double& v : v2) v = std::abs(rng.normal());
  }

  const std::string path = tmp.file("ck.json");
  save_checkpoint(path, params, adam, {cfg, 123, 9});
  const LoadedCheckpoint loaded = load_checkpoint(path);

  EXPECT_EQ(loaded.meta.seed, 123u);
  EXPECT_EQ(loaded.meta.epoch, 9u);
  EXPECT_EQ(loaded.meta.config.width, cfg.width);
  EXPECT_EQ(loaded.meta.config.attention_scaled, true);
  EXPECT_EQ(loaded.adam.step, 17u);
  ASSERT_EQ(loaded.params.tensors().size(), params.tensors().size());
  for (std::size_t i = 0; i < params.tensors().size(); ++i) {
    EXPECT_EQ(loaded.params.tensors()[i].name, params.tensors()[i].name);
    EXPECT_EQ(loaded.params.tensors()[i].tensor.values(), params.tensors()[i].tensor.values());
    EXPECT_EQ(loaded.adam.m[i], adam.m[i]);
    EXPECT_EQ(loaded.adam.v[i], adam.v[i]);
  }

  // save(load(x)) is also byte-identical
  const std::string path2 = tmp.file("ck2.json");
  save_checkpoint(path2, loaded.params, loaded.adam, loaded.meta);
  std::ifstream a(path), b(path2);
  std::stringstream sa, sb;
  sa << a.rdbuf();
  sb << b.rdbuf();
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Checkpoint, MissingFileIsFileError) {
  EXPECT_THROW(load_checkpoint("/nonexistent/ck.json"), file_error);
}

TEST(Manifest, GitBlobHashMatchesGit) {
  // `printf 'hello world\n' | git hash-object --stdin`
  EXPECT_EQ(git_blob_hash("hello world\n"), "3b18e512dba79e4c8300dd08aeb37f8e728b8dad");
  EXPECT_EQ(git_blob_hash(""), "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
}

TEST(Manifest, WritesJson) {
  TempDir tmp;
  RunManifest m;
  m.command = "generate";
  m.seed = 42;
  m.config["--n"] = "100";
  m.inputs["data.jsonl"] = git_blob_hash("x");
  m.outputs = {"out.jsonl"};
  const std::string path = tmp.file("manifest.json");
  m.write(path);
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_NE(ss.str().find("\"command\": \"generate\""), std::string::npos);
  EXPECT_NE(ss.str().find("\"seed\": 42"), std::string::npos);
}

TEST(SvgRender, OnePathPerPolyline) {
  ScenarioSpec spec;
  spec.n_map_polylines = 5;  // includes a stop sign rendered as a dot path
  spec.n_other_agents = 2;
  spec.seed = 9;
  const Scene s = generate(spec);
  std::vector<Point2> pred;
  for (const Point2& p : s.future_gt) pred.push_back(p + Point2{0.5, 0.5});
  std::vector<double> attention(s.polylines.size(), 1.0 / static_cast<double>(s.polylines.size()));

  const std::string svg = render_scene_svg(s, pred, attention);
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("</svg>"), std::string::npos);

  std::size_t count = 0;
  for (std::size_t pos = svg.find("class=\"polyline\""); pos != std::string::npos;
       pos = svg.find("class=\"polyline\"", pos + 1)) {
    ++count;
  }
  EXPECT_EQ(count, s.polylines.size());
  EXPECT_NE(svg.find("class=\"gt\""), std::string::npos);
  EXPECT_NE(svg.find("class=\"pred\""), std::string::npos);
}

}  // namespace
}  // namespace polyvec
