// Copyright 2026 The Gazeloop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <filesystem>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "gazeloop/benchmark.hpp"
#include "gazeloop/errors.hpp"
#include "gazeloop/scene.hpp"

using namespace gazeloop;
using gazeloop::testing::small_scene;

TEST_SUITE("scene") {

TEST_CASE("generation is a pure function of the config") {
  auto config = benchmark_scene(4);
  CHECK(generate_scene(config) == generate_scene(config));
  auto other = config;
  other.seed = 5;
  CHECK_FALSE(generate_scene(other).frames == generate_scene(config).frames);
}

TEST_CASE("frames are indexed contiguously with one fixation each") {
  auto ds = generate_scene(small_scene(12));
  REQUIRE(ds.frames.size() == 12);
  REQUIRE(ds.fixations.size() == 12);
  for (std::size_t i = 0; i < ds.frames.size(); ++i) {
    CHECK(ds.frames[i].index == i);
    CHECK(ds.frames[i].time_s == doctest::Approx(i / 10.0));
    CHECK(ds.fixations[i].frame == i);
  }
}

TEST_CASE("ground-truth boxes stay valid and inside the frame under jitter") {
  auto config = benchmark_scene(9);
  config.camera_jitter = 25.0;
  auto ds = generate_scene(config);
  for (const auto& f : ds.frames) {
    std::set<std::int64_t> ids;
    for (const auto& o : f.objects) {
      CHECK(o.box.valid());
      CHECK(o.box.x_min >= 0.0);
      CHECK(o.box.y_min >= 0.0);
      CHECK(o.box.x_max <= config.width);
      CHECK(o.box.y_max <= config.height);
      CHECK(o.appearance.size() == config.appearance_dim());
      CHECK(ids.insert(o.instance_id).second);
    }
  }
}

TEST_CASE("instance ids keep their labels across frames") {
  auto ds = generate_scene(benchmark_scene(2));
  std::map<std::int64_t, std::string> label_of;
  for (const auto& f : ds.frames)
    for (const auto& o : f.objects) {
      auto [it, inserted] = label_of.emplace(o.instance_id, o.class_label);
      CHECK(it->second == o.class_label);
    }
  CHECK(label_of.size() == 5);
}

TEST_CASE("object visibility range") {
  auto config = small_scene(10);
  config.objects[1].first_frame = 3;
  config.objects[1].last_frame = 5;
  auto ds = generate_scene(config);
  for (const auto& f : ds.frames) {
    const bool visible = f.index >= 3 && f.index <= 5;
    CHECK(f.objects.size() == (visible ? 3u : 2u));
  }
}

TEST_CASE("mirrored pair shares appearance and labels by initial x-center") {
  auto ds = generate_scene(mirrored_pair_scene(1));
  for (const auto& f : ds.frames) {
    const GtObject* left = nullptr;
    const GtObject* right = nullptr;
    for (const auto& o : f.objects) {
      if (o.class_label == "device-left") left = &o;
      if (o.class_label == "device-right") right = &o;
    }
    REQUIRE(left);
    REQUIRE(right);
    CHECK(left->appearance == right->appearance);
    CHECK(left->instance_id == 4);
    CHECK(right->instance_id == 5);
  }
  CHECK(ds.class_labels() ==
        std::vector<std::string>{"book", "device-left", "device-right", "table", "tablet"});
}

TEST_CASE("mirrored pair labels follow the instance, not the position") {
  auto config = small_scene(30);
  config.objects[0].motion = gazeloop::testing::linear(5.0, 0.0);  // cup starts left, passes pen
  config.objects[1].appearance = config.objects[0].appearance;
  config.mirrored_pairs = {{0, 1}};
  auto ds = generate_scene(config);
  for (const auto& f : ds.frames) {
    for (const auto& o : f.objects) {
      if (o.instance_id == 1) CHECK(o.class_label == "cup-left");
      if (o.instance_id == 2) CHECK(o.class_label == "cup-right");
    }
  }
}

TEST_CASE("fixation AOI is the smallest containing ground-truth box") {
  auto ds = generate_scene(benchmark_scene(3));
  for (std::size_t i = 0; i < ds.frames.size(); ++i) {
    const auto& fix = ds.fixations[i];
    CHECK(fix.x >= 0.0);
    CHECK(fix.x <= ds.config.width);
    std::vector<LabeledBox> boxes;
    for (const auto& o : ds.frames[i].objects) boxes.push_back({o.box, o.class_label});
    auto hit = smallest_containing(boxes, fix.x, fix.y);
    CHECK(fix.aoi_label == (hit ? boxes[*hit].label : std::string(kBackground)));
  }
}

TEST_CASE("config validation") {
  auto bad = small_scene();
  bad.fps = 0.0;
  CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);
  bad = small_scene();
  bad.width = -1.0;
  CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);
  bad = small_scene();
  bad.objects[2].appearance = {1, 2};
  CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);
  bad = small_scene();
  bad.objects[0].initial_box = {10, 10, 5, 20};
  CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);
  bad = small_scene();
  bad.mirrored_pairs = {{0, 7}};
  CHECK_THROWS_AS(generate_scene(bad), std::invalid_argument);
}

TEST_CASE("dataset round trip through a file") {
  auto ds = generate_scene(benchmark_scene(6));
  auto dir = std::filesystem::temp_directory_path() / "gazeloop_scene_test";
  std::filesystem::create_directories(dir);
  save_dataset(ds, dir / "dataset.jsonl");
  CHECK(load_dataset(dir / "dataset.jsonl") == ds);
  std::filesystem::remove_all(dir);
}

TEST_CASE("truncated dataset is a parse error") {
  auto text = dataset_to_string(generate_scene(small_scene(5)));
  auto cut = text.substr(0, text.rfind('\n', text.size() - 2) + 1);
  CHECK_THROWS_AS(dataset_from_string(cut), ParseError);
  // A line cut mid-record names that line.
  auto partial = text.substr(0, text.size() - 10);
  try {
    dataset_from_string(partial);
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line() == 6);
  }
}

TEST_CASE("empty frame list is an invalid dataset") {
  auto text = dataset_to_string(generate_scene(small_scene(5)));
  auto header_only = text.substr(0, text.find('\n') + 1);
  CHECK_THROWS_AS(dataset_from_string(header_only), InvalidDataset);
}

TEST_CASE("records without schema_version are rejected") {
  CHECK_THROWS_AS(dataset_from_string("{\"record\":\"scene_header\"}\n"), ParseError);
  CHECK_THROWS_AS(dataset_from_string("not json\n"), ParseError);
}

}
