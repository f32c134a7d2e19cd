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

#include "gazeloop/benchmark.hpp"

#include <random>

#include "gazeloop/rng.hpp"

namespace gazeloop {

namespace {

constexpr std::size_t kAppearanceDim = 16;

FeatureVector random_appearance(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureVector v(kAppearanceDim);
  for (double& x : v) x = normal(rng);
  return v;
}

Motion sway(double ax, double ay, double period, double phase) {
  Motion m;
  m.kind = MotionKind::kSinusoidal;
  m.amplitude_x = ax;
  m.amplitude_y = ay;
  m.period_frames = period;
  m.phase = phase;
  return m;
}

Motion drift(double vx, double vy) {
  Motion m;
  m.kind = MotionKind::kLinear;
  m.velocity_x = vx;
  m.velocity_y = vy;
  return m;
}

}  // namespace

SceneConfig benchmark_scene(std::uint64_t seed) {
  auto rng = make_rng(seed, {0xbe4cULL});
  SceneConfig c;
  c.frame_count = 300;
  c.fps = 30.0;
  c.width = 640.0;
  c.height = 480.0;
  c.seed = seed;

  ObjectSpec table{"table", random_appearance(rng), {40, 250, 600, 470}, {}, 0, std::nullopt};
  ObjectSpec book{"book", random_appearance(rng), {70, 330, 170, 440}, sway(12, 6, 90, 0.0), 0,
                  std::nullopt};
  ObjectSpec tablet{"tablet", random_appearance(rng), {250, 60, 370, 150}, drift(0.25, 0.1), 20,
                    std::nullopt};
  ObjectSpec device{"device", random_appearance(rng), {200, 170, 270, 240}, sway(8, 4, 120, 0.5),
                    0, std::nullopt};
  ObjectSpec device_twin = device;
  device_twin.initial_box = {400, 170, 470, 240};
  device_twin.motion = sway(8, 4, 120, 2.0);
  c.objects = {table, book, tablet, device, device_twin};
  c.mirrored_pairs = {{3, 4}};

  c.appearance_noise = 0.15;
  c.appearance_drift = 1.0;
  c.camera = drift(0.15, 0.0);
  c.camera_jitter = 1.0;
  return c;
}

SceneConfig mirrored_pair_scene(std::uint64_t seed) {
  SceneConfig c = benchmark_scene(seed);
  c.appearance_noise = 0.0;
  c.appearance_drift = 0.0;
  return c;
}

HilConfig benchmark_hil_config(std::uint64_t seed) {
  HilConfig h;
  h.t_initial_s = 0.5;
  h.t_update_s = 0.5;
  h.max_update = 3;
  h.architecture.hidden_dim = 32;
  h.architecture.depth = 2;
  h.architecture.aggregator = AggregatorKind::kMaxPool;
  h.train.epochs = 150;
  h.train.learning_rate = 1e-2;
  h.detector.localization_jitter = 3.0;
  h.detector.miss_probability = 0.05;
  h.detector.spurious_rate = 0.8;
  h.detector.descriptor_noise = 0.2;
  h.detector.seed = derive_seed(seed, 11);
  h.schedule.decay = 0.7;
  return h;
}

}  // namespace gazeloop
