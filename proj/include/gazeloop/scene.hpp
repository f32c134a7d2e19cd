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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gazeloop/geometry.hpp"
#include "gazeloop/numerics.hpp"

namespace gazeloop {

enum class MotionKind { kStatic, kLinear, kSinusoidal };

/// Displacement (px) of an object or the camera as a function of frame index.
struct Motion {
  MotionKind kind = MotionKind::kStatic;
  double velocity_x = 0.0;  // px/frame, linear
  double velocity_y = 0.0;
  double amplitude_x = 0.0;  // px, sinusoidal
  double amplitude_y = 0.0;
  double period_frames = 1.0;
  double phase = 0.0;  // radians

  double dx(std::size_t frame) const;
  double dy(std::size_t frame) const;
  friend bool operator==(const Motion&, const Motion&) = default;
};

struct ObjectSpec {
  std::string class_label;
  FeatureVector appearance;
  BoundingBox initial_box;
  Motion motion;
  /// Visible frame range, inclusive.
  std::size_t first_frame = 0;
  std::optional<std::size_t> last_frame;
  friend bool operator==(const ObjectSpec&, const ObjectSpec&) = default;
};

/// Two object specs that share the first one's appearance and base label. The
/// instance with the smaller x-center in frame 0 becomes "<label>-left".
struct MirroredPair {
  std::size_t first = 0;
  std::size_t second = 0;
  friend bool operator==(const MirroredPair&, const MirroredPair&) = default;
};

struct GazeConfig {
  std::size_t dwell_frames = 15;
  double saccade_noise_px = 4.0;
  /// Chance that a dwell targets the background instead of an object.
  double background_probability = 0.2;
  friend bool operator==(const GazeConfig&, const GazeConfig&) = default;
};

struct SceneConfig {
  std::size_t frame_count = 300;
  double fps = 30.0;
  double width = 640.0;
  double height = 480.0;
  std::vector<ObjectSpec> objects;
  std::vector<MirroredPair> mirrored_pairs;
  double appearance_noise = 0.0;  // sigma_app
  double camera_jitter = 0.0;     // sigma_cam, px
  Motion camera;
  /// Norm of the appearance offset reached on the last frame; each appearance
  /// group drifts along its own random unit direction.
  double appearance_drift = 0.0;
  GazeConfig gaze;
  std::uint64_t seed = 0;

  FrameSize frame_size() const { return {width, height}; }
  std::size_t appearance_dim() const;
  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

struct GtObject {
  std::string class_label;
  std::int64_t instance_id = 0;
  BoundingBox box;
  FeatureVector appearance;
  friend bool operator==(const GtObject&, const GtObject&) = default;
};

struct Frame {
  std::size_t index = 0;
  double time_s = 0.0;
  std::vector<GtObject> objects;
  friend bool operator==(const Frame&, const Frame&) = default;
};

struct FixationPoint {
  std::size_t frame = 0;
  double x = 0.0;
  double y = 0.0;
  /// Ground-truth AOI: the smallest GT box containing the point, else background.
  std::string aoi_label;
  friend bool operator==(const FixationPoint&, const FixationPoint&) = default;
};

struct SceneDataset {
  SceneConfig config;
  std::vector<Frame> frames;
  std::vector<FixationPoint> fixations;  // one per frame when present

  FrameSize frame_size() const { return config.frame_size(); }
  /// Sorted distinct labels across all frames.
  std::vector<std::string> class_labels() const;
  friend bool operator==(const SceneDataset&, const SceneDataset&) = default;
};

/// Throws std::invalid_argument describing the first violated constraint.
void validate(const SceneConfig& config);

/// Pure function of `config`, fixations included.
SceneDataset generate_scene(const SceneConfig& config);

/// Dwell/saccade gaze model over the dataset's ground truth.
std::vector<FixationPoint> simulate_gaze(const SceneDataset& dataset, const GazeConfig& gaze,
                                         std::uint64_t seed);

/// Line-delimited JSON: a scene_header record, then one frame record per line.
void save_dataset(const SceneDataset& dataset, const std::filesystem::path& path);
std::string dataset_to_string(const SceneDataset& dataset);

/// Throws ParseError (with line number) on malformed or truncated content and
/// InvalidDataset when the file holds no frames.
SceneDataset load_dataset(const std::filesystem::path& path);
SceneDataset dataset_from_string(const std::string& text);

}  // namespace gazeloop
