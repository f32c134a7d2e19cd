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

#pragma once

// Shared scenes, graphs and a gradient checker for the unit and acceptance
// suites.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "gazeloop/impn.hpp"
#include "gazeloop/numerics.hpp"
#include "gazeloop/proposals.hpp"
#include "gazeloop/rng.hpp"
#include "gazeloop/scene.hpp"

namespace gazeloop::testing {

inline ObjectSpec object(std::string label, FeatureVector appearance, BoundingBox box,
                         Motion motion = {}) {
  ObjectSpec o;
  o.class_label = std::move(label);
  o.appearance = std::move(appearance);
  o.initial_box = box;
  o.motion = motion;
  return o;
}

inline Motion linear(double vx, double vy) {
  Motion m;
  m.kind = MotionKind::kLinear;
  m.velocity_x = vx;
  m.velocity_y = vy;
  return m;
}

/// Three static, appearance-separable objects in a 200x100 frame.
inline SceneConfig small_scene(std::size_t frames = 20, std::uint64_t seed = 1) {
  SceneConfig c;
  c.frame_count = frames;
  c.fps = 10.0;
  c.width = 200.0;
  c.height = 100.0;
  c.seed = seed;
  c.objects = {object("cup", {1, 0, 0, 0}, {10, 10, 50, 50}),
               object("pen", {0, 1, 0, 0}, {80, 20, 120, 60}),
               object("lamp", {0, 0, 1, 0}, {140, 30, 190, 90})};
  return c;
}

/// One noiseless object moving at (vx, vy) px per frame in a 640x480 frame.
inline SceneConfig moving_scene(double vx, double vy, std::size_t frames) {
  SceneConfig c;
  c.frame_count = frames;
  c.fps = 30.0;
  c.width = 640.0;
  c.height = 480.0;
  c.seed = 3;
  c.objects = {object("ball", {0.5, -1.0, 2.0, 0.3}, {40, 200, 100, 260}, linear(vx, vy))};
  return c;
}

inline DetectionRecord detection(BoundingBox box, FeatureVector descriptor, std::size_t frame = 0) {
  return {frame, box, std::move(descriptor), std::nullopt};
}

inline std::vector<DetectionRecord> random_detections(Rng& rng, std::size_t n, std::size_t d_app,
                                                      FrameSize size) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<DetectionRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    const double w = 10 + 60 * unit(rng), h = 10 + 60 * unit(rng);
    const double x = unit(rng) * (size.width - w), y = unit(rng) * (size.height - h);
    FeatureVector desc(d_app);
    for (double& v : desc) v = normal(rng);
    out.push_back(detection({x, y, x + w, y + h}, std::move(desc)));
  }
  return out;
}

/// Model with every parameter drawn from N(0, scale^2), biases included, so
/// ReLUs and max-pool ties are not degenerate.
inline ImpnModel random_model(Rng& rng, std::size_t input_dim, std::size_t hidden,
                              std::size_t depth, std::size_t classes, AggregatorKind agg,
                              double scale = 0.5) {
  ImpnArchitecture arch;
  arch.input_dim = input_dim;
  arch.hidden_dim = hidden;
  arch.depth = depth;
  arch.aggregator = agg;
  for (std::size_t c = 0; c < classes; ++c) arch.class_labels.push_back("c" + std::to_string(c));
  auto model = init_model(arch, rng());
  std::normal_distribution<double> normal(0.0, scale);
  for (DenseMatrix* p : model.parameters())
    for (double& v : p->values()) v = normal(rng);
  return model;
}

inline std::vector<double> flatten(const ImpnModel& model) {
  std::vector<double> out;
  for (const DenseMatrix* p : model.parameters())
    out.insert(out.end(), p->values().begin(), p->values().end());
  return out;
}

inline void unflatten(std::span<const double> flat, ImpnModel& model) {
  std::size_t i = 0;
  for (DenseMatrix* p : model.parameters())
    for (double& v : p->values()) v = flat[i++];
}

struct GradientCheck {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
};

/// Compares loss_and_backward against central differences of graph_loss for
/// every parameter.
inline GradientCheck check_gradients(const FrameGraph& graph, const ImpnModel& model,
                                     std::span<const std::size_t> targets, double h = 1e-6) {
  const auto analytic = flatten(loss_and_backward(graph, model, targets).gradient);
  ImpnModel probe = model;
  auto f = [&](std::span<const double> x) {
    unflatten(x, probe);
    return graph_loss(graph, probe, targets);
  };
  const auto numeric = finite_diff_grad(f, flatten(model), h);
  GradientCheck out;
  out.parameters = analytic.size();
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    out.max_relative_error =
        std::max(out.max_relative_error, relative_error(analytic[i], numeric[i], 1e-4));
  }
  return out;
}

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / ("gazeloop_" + name)) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
};

}  // namespace gazeloop::testing
