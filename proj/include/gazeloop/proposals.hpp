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
#include <map>
#include <optional>
#include <vector>

#include "gazeloop/geometry.hpp"
#include "gazeloop/numerics.hpp"
#include "gazeloop/scene.hpp"

namespace gazeloop {

/// One candidate region. `score` is the detector's confidence; the graph
/// network does not consume it.
struct DetectionRecord {
  std::size_t frame = 0;
  BoundingBox box;
  FeatureVector descriptor;
  std::optional<double> score;
  friend bool operator==(const DetectionRecord&, const DetectionRecord&) = default;
};

/// Noise model of the simulated detector.
struct DetectorConfig {
  double localization_jitter = 0.0;  // sigma_loc, px per box edge
  double miss_probability = 0.0;     // p_miss in [0, 1)
  double spurious_rate = 0.0;        // lambda_fp, expected false positives per frame
  double descriptor_noise = 0.0;     // sigma_d
  double background_scale = 1.0;     // stddev of spurious descriptors
  std::uint64_t seed = 0;
  friend bool operator==(const DetectorConfig&, const DetectorConfig&) = default;
};

/// How feedback rounds shrink detector noise: each round multiplies
/// localization jitter, miss probability and spurious rate by `decay`.
struct DetectorSchedule {
  double decay = 1.0;
  friend bool operator==(const DetectorSchedule&, const DetectorSchedule&) = default;
};

void validate(const DetectorConfig& config);

DetectorConfig detector_for_round(const DetectorConfig& base, const DetectorSchedule& schedule,
                                  std::size_t round);

/// Deterministic per (frame index, seed). The random draws per ground-truth
/// object are made whether or not it is missed, so lowering the noise levels
/// shrinks the perturbation of every record proportionally.
std::vector<DetectionRecord> detect_regions(const Frame& frame, const DetectorConfig& config,
                                            FrameSize frame_size);

/// Per-frame detections for the whole dataset, indexed by frame.
using DetectionTable = std::vector<std::vector<DetectionRecord>>;
DetectionTable detect_all(const SceneDataset& dataset, const DetectorConfig& config);

/// Greedy IoU matching (highest IoU first, each GT used once). Entry i holds the
/// index of the GT object matched to detection i, if any. Unmatched detections
/// count as background.
std::vector<std::optional<std::size_t>> match_to_ground_truth(
    std::span<const DetectionRecord> detections, std::span<const GtObject> truth,
    double iou_threshold = 0.5);

void save_detections(const DetectionTable& table, const std::filesystem::path& path);
std::string detections_to_string(const DetectionTable& table);

/// Records grouped by frame. Empty input yields an empty map. Throws ParseError
/// on schema violations and InvalidDataset when descriptor lengths differ.
std::map<std::size_t, std::vector<DetectionRecord>> load_detections(
    const std::filesystem::path& path);
std::map<std::size_t, std::vector<DetectionRecord>> detections_from_string(
    const std::string& text);

}  // namespace gazeloop
