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

#include <cmath>
#include <set>

#include "doctest.h"
#include "fixtures.hpp"
#include "gazeloop/vos.hpp"

using namespace gazeloop;
using namespace gazeloop::testing;

namespace {

MemoryEntry entry(std::int64_t id, std::string label, FeatureVector key, BoundingBox box) {
  MemoryEntry e;
  e.instance_id = id;
  e.label = std::move(label);
  e.key = std::move(key);
  e.box = box;
  return e;
}

std::vector<AnnotatedRegion> seed_from_truth(const Frame& frame) {
  std::vector<AnnotatedRegion> out;
  for (const auto& o : frame.objects)
    out.push_back({frame.index, o.box, o.class_label, o.instance_id, RegionSource::kUser});
  return out;
}

}  // namespace

TEST_SUITE("vos") {

TEST_CASE("memory read examples") {
  VosMemory memory({}, {640, 480});
  memory.upsert(entry(1, "cup", {1, 0, 0}, {100, 100, 140, 140}));
  std::vector<DetectionRecord> dets{detection({100, 100, 140, 140}, {2, 0, 0}),
                                    detection({300, 300, 340, 340}, {0, 1, 0})};
  auto c = memory_read(dets, memory);
  REQUIRE(c.rows() == 2);
  REQUIRE(c.cols() == 1);
  CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(c(1, 0) == 0.0);

  VosMemory empty({}, {640, 480});
  auto none = memory_read(dets, empty);
  CHECK(none.rows() == 2);
  CHECK(none.cols() == 0);
}

TEST_CASE("correlation ranking follows hand cosine arithmetic") {
  VosMemory memory({}, {640, 480});
  memory.upsert(entry(1, "cup", {1, 1}, {100, 100, 140, 140}));
  // Same position, so the gate is 1 for both: cos = 3/sqrt(10) and 1/sqrt(2).
  std::vector<DetectionRecord> dets{detection({100, 100, 140, 140}, {1, 2}),
                                    detection({100, 100, 140, 140}, {1, 0})};
  auto c = memory_read(dets, memory);
  CHECK(c(0, 0) == doctest::Approx(3.0 / std::sqrt(10.0)).epsilon(1e-14));
  CHECK(c(1, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
  CHECK(c(0, 0) > c(1, 0));
}

TEST_CASE("spatial gate uses the predicted box") {
  VosConfig config;
  VosMemory memory(config, {640, 480});
  auto e = entry(1, "cup", {1}, {100, 100, 140, 140});
  e.velocity_x = 10.0;
  memory.upsert(e);
  std::vector<DetectionRecord> dets{detection({110, 100, 150, 140}, {1}),
                                    detection({100, 100, 140, 140}, {1})};
  auto c = memory_read(dets, memory);
  CHECK(c(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  const double sigma = 0.25 * 800.0;
  CHECK(c(1, 0) == doctest::Approx(std::exp(-100.0 / (2 * sigma * sigma))).epsilon(1e-14));
}

TEST_CASE("correlations stay within [-1, 1]") {
  auto rng = make_rng(50);
  VosMemory memory({}, {320, 240});
  std::normal_distribution<double> normal;
  for (std::int64_t id = 1; id <= 5; ++id) {
    FeatureVector key(4);
    for (double& v : key) v = normal(rng) * 10;
    memory.upsert(entry(id, "x", key, {10.0 * id, 10, 10.0 * id + 20, 30}));
  }
  for (int trial = 0; trial < 20; ++trial) {
    auto dets = random_detections(rng, 6, 4, {320, 240});
    auto c = memory_read(dets, memory);
    for (double v : c.values()) {
      CHECK(v >= -1.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("assign labels examples") {
  VosMemory memory({}, {640, 480});
  memory.upsert(entry(7, "cup", {1, 0}, {100, 100, 140, 140}));
  std::vector<DetectionRecord> one{detection({101, 100, 141, 140}, {1, 0.1})};
  auto a = assign_labels(one, memory, memory_read(one, memory));
  REQUIRE(a.regions.size() == 1);
  CHECK(a.regions[0].label == "cup");
  CHECK(a.regions[0].instance_id == 7);
  CHECK(a.matches == MatchList{{0, 0}});

  std::vector<DetectionRecord> unlike{detection({101, 100, 141, 140}, {0, 1}),
                                      detection({300, 100, 340, 140}, {-1, 0})};
  auto b = assign_labels(unlike, memory, memory_read(unlike, memory));
  CHECK(b.matches.empty());
  for (const auto& r : b.regions) {
    CHECK(r.label == kBackground);
    CHECK(r.instance_id > 7);
  }
  CHECK(b.regions[0].instance_id != b.regions[1].instance_id);
}

TEST_CASE("equal-appearance detections: the nearer one wins, as in exhaustive assignment") {
  VosMemory memory({}, {640, 480});
  memory.upsert(entry(1, "device", {0.3, 0.7, 0.1}, {200, 200, 260, 260}));
  auto rng = make_rng(51);
  std::uniform_real_distribution<double> offset(-150.0, 150.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DetectionRecord> dets;
    for (int i = 0; i < 2; ++i) {
      const double dx = offset(rng), dy = offset(rng);
      dets.push_back(detection({200 + dx, 200 + dy, 260 + dx, 260 + dy}, {0.3, 0.7, 0.1}));
    }
    auto c = memory_read(dets, memory);
    // Exhaustive: the entry goes to detection 0 or detection 1 (or to none
    // when both fall below the threshold); keep the best total correlation.
    std::optional<std::size_t> best;
    double best_total = 0.0;
    for (std::size_t i = 0; i < 2; ++i) {
      if (c(i, 0) >= 0.5 && (!best || c(i, 0) > best_total)) {
        best = i;
        best_total = c(i, 0);
      }
    }
    auto a = assign_labels(dets, memory, c);
    if (best) {
      REQUIRE(a.matches.size() == 1);
      CHECK(a.matches[0].first == *best);
      auto dist = [](const BoundingBox& b) { return std::hypot(b.center_x() - 230, b.center_y() - 230); };
      CHECK(dist(dets[*best].box) <= dist(dets[1 - *best].box));
    } else {
      CHECK(a.matches.empty());
    }
  }
}

TEST_CASE("assignment is a partial injection") {
  auto rng = make_rng(52);
  VosConfig config;
  config.match_threshold = 0.0;
  for (int trial = 0; trial < 30; ++trial) {
    VosMemory memory(config, {320, 240});
    auto seeds = random_detections(rng, 4, 3, {320, 240});
    for (std::size_t k = 0; k < seeds.size(); ++k)
      memory.upsert(entry(static_cast<std::int64_t>(k + 1), "x", seeds[k].descriptor, seeds[k].box));
    auto dets = random_detections(rng, 6, 3, {320, 240});
    auto a = assign_labels(dets, memory, memory_read(dets, memory));
    std::set<std::int64_t> ids;
    for (const auto& r : a.regions) CHECK(ids.insert(r.instance_id).second);
    std::set<std::size_t> det_seen, entry_seen;
    for (auto [i, k] : a.matches) {
      CHECK(det_seen.insert(i).second);
      CHECK(entry_seen.insert(k).second);
    }
  }
}

TEST_CASE("memory write examples") {
  VosConfig replace;
  replace.memory_decay = 1.0;
  VosMemory memory(replace, {640, 480});
  memory.upsert(entry(1, "cup", {1, 0}, {100, 100, 140, 140}));
  memory.upsert(entry(2, "pen", {0, 1}, {300, 100, 340, 140}));
  std::vector<DetectionRecord> dets{detection({104, 100, 144, 140}, {0.2, 0.9})};
  auto c = memory_read(dets, memory);
  memory_write(dets, memory, c, MatchList{{0, 0}});
  CHECK(memory.entries()[0].key == FeatureVector{0.2, 0.9});
  CHECK(memory.entries()[0].age == 0);
  CHECK(memory.entries()[0].velocity_x == doctest::Approx(2.0));  // EMA 0.5 of 4 px
  CHECK(memory.entries()[0].box == dets[0].box);
  CHECK(memory.entries()[1].age == 1);

  const auto keys_before = memory.entries();
  memory_write(dets, memory, c, MatchList{});
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(memory.entries()[k].key == keys_before[k].key);
    CHECK(memory.entries()[k].age == keys_before[k].age + 1);
  }
}

TEST_CASE("memory write rejects non-injective matches") {
  VosMemory memory({}, {640, 480});
  memory.upsert(entry(1, "cup", {1, 0}, {100, 100, 140, 140}));
  memory.upsert(entry(2, "pen", {0, 1}, {300, 100, 340, 140}));
  std::vector<DetectionRecord> dets{detection({100, 100, 140, 140}, {1, 0}),
                                    detection({300, 100, 340, 140}, {0, 1})};
  auto c = memory_read(dets, memory);
  CHECK_THROWS_AS(memory_write(dets, memory, c, MatchList{{0, 0}, {1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(memory_write(dets, memory, c, MatchList{{0, 0}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(memory_write(dets, memory, c, MatchList{{5, 0}}), std::invalid_argument);
}

TEST_CASE("static object drives the velocity estimate to zero") {
  std::vector<DetectionRecord> dets{detection({100, 100, 140, 140}, {1, 0})};
  VosMemory fresh({}, {640, 480});
  fresh.upsert(entry(1, "cup", {1, 0}, {100, 100, 140, 140}));
  for (int t = 0; t < 10; ++t) propagate_frame(fresh, t, dets);
  CHECK(std::abs(fresh.entries()[0].velocity_x) <= 1e-9);
  CHECK(std::abs(fresh.entries()[0].velocity_y) <= 1e-9);

  // A stale velocity halves on every update.
  VosMemory moving({}, {640, 480});
  auto e = entry(1, "cup", {1, 0}, {100, 100, 140, 140});
  e.velocity_x = 3.0;
  moving.upsert(e);
  propagate_frame(moving, 0, dets);
  CHECK(moving.entries()[0].velocity_x == doctest::Approx(1.5));
  for (int t = 1; t < 40; ++t) propagate_frame(moving, t, dets);
  CHECK(std::abs(moving.entries()[0].velocity_x) <= 1e-9);
}

TEST_CASE("capacity and eviction") {
  VosConfig small;
  small.capacity = 3;
  VosMemory memory(small, {640, 480});
  for (std::int64_t id = 1; id <= 5; ++id) {
    auto e = entry(id, "x", {1, 0}, {0, 0, 10, 10});
    e.age = static_cast<std::size_t>(10 - id);
    memory.upsert(e);
    CHECK(memory.size() <= 3);
  }
  std::set<std::int64_t> ids;
  for (const auto& e : memory.entries()) ids.insert(e.instance_id);
  CHECK(ids == std::set<std::int64_t>{3, 4, 5});
  CHECK(memory.next_provisional_id() == 6);
  CHECK_THROWS_AS(memory.upsert(entry(9, "x", {1, 0, 0}, {0, 0, 10, 10})), std::invalid_argument);
}

TEST_CASE("entries unseen beyond max age are dropped") {
  VosConfig config;
  config.max_age = 2;
  VosMemory memory(config, {640, 480});
  memory.upsert(entry(1, "cup", {1, 0}, {100, 100, 140, 140}));
  std::vector<DetectionRecord> none;
  propagate_frame(memory, 1, none);
  propagate_frame(memory, 2, none);
  CHECK(memory.size() == 1);
  propagate_frame(memory, 3, none);
  CHECK(memory.size() == 0);
}

TEST_CASE("static noiseless scene: propagation is the identity extension of the seed") {
  auto ds = generate_scene(small_scene(15));
  auto table = detect_all(ds, DetectorConfig{});
  auto seed = seed_from_truth(ds.frames[0]);
  auto out = propagate_annotations(seed, 0, 14, table, VosConfig{}, ds.frame_size());
  REQUIRE(out.size() == 15);
  CHECK(out[0] == seed);
  for (std::size_t t = 1; t < out.size(); ++t) {
    REQUIRE(out[t].size() == seed.size());
    for (std::size_t i = 0; i < seed.size(); ++i) {
      CHECK(out[t][i].frame == t);
      CHECK(out[t][i].box == seed[i].box);
      CHECK(out[t][i].label == seed[i].label);
      CHECK(out[t][i].instance_id == seed[i].instance_id);
      CHECK(out[t][i].source == RegionSource::kPropagated);
    }
  }
}

TEST_CASE("linear motion keeps IoU high after warm-up") {
  auto ds = generate_scene(moving_scene(2.0, 0.0, 60));
  auto table = detect_all(ds, DetectorConfig{});
  auto out = propagate_annotations(seed_from_truth(ds.frames[0]), 0, 59, table, VosConfig{},
                                   ds.frame_size());
  for (std::size_t t = 4; t < out.size(); ++t) {
    REQUIRE(out[t].size() == 1);
    CHECK(out[t][0].label == "ball");
    CHECK(iou(out[t][0].box, ds.frames[t].objects[0].box) >= 0.9);
  }
}

TEST_CASE("mirrored pair moving apart never swaps ids") {
  SceneConfig c;
  c.frame_count = 100;
  c.fps = 30;
  c.width = 640;
  c.height = 480;
  c.objects = {object("device", {0.2, 0.9, -0.4}, {280, 200, 310, 230}, linear(-1.5, 0.2)),
               object("device", {0.2, 0.9, -0.4}, {330, 200, 360, 230}, linear(1.5, -0.2))};
  c.mirrored_pairs = {{0, 1}};
  auto ds = generate_scene(c);
  auto table = detect_all(ds, DetectorConfig{});
  auto out = propagate_annotations(seed_from_truth(ds.frames[0]), 0, 99, table, VosConfig{},
                                   ds.frame_size());
  for (std::size_t t = 1; t < out.size(); ++t) {
    REQUIRE(out[t].size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(out[t][i].instance_id == ds.frames[t].objects[i].instance_id);
      CHECK(out[t][i].label == ds.frames[t].objects[i].class_label);
    }
  }
}

TEST_CASE("propagation argument checks") {
  auto ds = generate_scene(small_scene(5));
  auto table = detect_all(ds, DetectorConfig{});
  auto seed = seed_from_truth(ds.frames[1]);
  CHECK_THROWS_AS(propagate_annotations(seed, 0, 3, table, VosConfig{}, ds.frame_size()),
                  std::invalid_argument);
  CHECK_THROWS_AS(propagate_annotations(seed, 3, 2, table, VosConfig{}, ds.frame_size()),
                  std::invalid_argument);
  CHECK_THROWS_AS(propagate_annotations({}, 0, 9, table, VosConfig{}, ds.frame_size()),
                  std::invalid_argument);
  VosConfig bad;
  bad.memory_decay = 0.0;
  CHECK_THROWS_AS(VosMemory(bad, {10, 10}), std::invalid_argument);
  CHECK(region_source_from_name(region_source_name(RegionSource::kUser)) == RegionSource::kUser);
  CHECK_THROWS_AS(region_source_from_name("robot"), std::invalid_argument);
}

}
