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

#include "gazeloop/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <tuple>

#include "gazeloop/errors.hpp"
#include "gazeloop/jsonl.hpp"
#include "gazeloop/rng.hpp"
#include "gazeloop/serialization.hpp"

namespace gazeloop {

void validate(const DetectorConfig& config) {
  if (!(config.miss_probability >= 0.0 && config.miss_probability < 1.0 + 1e-12)) {
    throw std::invalid_argument("miss probability must be in [0, 1]");
  }
  if (config.localization_jitter < 0.0 || config.spurious_rate < 0.0 ||
      config.descriptor_noise < 0.0 || config.background_scale < 0.0) {
    throw std::invalid_argument("detector noise parameters must be non-negative");
  }
}

DetectorConfig detector_for_round(const DetectorConfig& base, const DetectorSchedule& schedule,
                                  std::size_t round) {
  const double f = std::pow(schedule.decay, static_cast<double>(round));
  DetectorConfig out = base;
  out.localization_jitter *= f;
  out.miss_probability *= f;
  out.spurious_rate *= f;
  return out;
}

std::vector<DetectionRecord> detect_regions(const Frame& frame, const DetectorConfig& config,
                                            FrameSize frame_size) {
  validate(config);
  auto rng = make_rng(config.seed, {frame.index});
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<DetectionRecord> out;
  for (const auto& gt : frame.objects) {
    const double miss_draw = unit(rng);
    BoundingBox box = gt.box;
    box.x_min += config.localization_jitter * normal(rng);
    box.y_min += config.localization_jitter * normal(rng);
    box.x_max += config.localization_jitter * normal(rng);
    box.y_max += config.localization_jitter * normal(rng);
    FeatureVector descriptor = gt.appearance;
    for (double& v : descriptor) v += config.descriptor_noise * normal(rng);
    const double score = 0.6 + 0.4 * unit(rng);
    if (miss_draw < config.miss_probability) continue;
    auto clamped = clamp_to_frame(box, frame_size);
    out.push_back({frame.index, clamped ? *clamped : gt.box, std::move(descriptor), score});
  }

  const std::size_t dim = frame.objects.empty() ? 0 : frame.objects.front().appearance.size();
  if (config.spurious_rate > 0.0 && dim > 0) {
    std::poisson_distribution<int> count_dist(config.spurious_rate);
    const int count = count_dist(rng);
    for (int k = 0; k < count; ++k) {
      const double w = 20.0 + 70.0 * unit(rng);
      const double h = 20.0 + 70.0 * unit(rng);
      const double x = unit(rng) * std::max(frame_size.width - w, 1.0);
      const double y = unit(rng) * std::max(frame_size.height - h, 1.0);
      FeatureVector descriptor(dim);
      for (double& v : descriptor) v = config.background_scale * normal(rng);
      const double score = 0.05 + 0.45 * unit(rng);
      auto clamped = clamp_to_frame({x, y, x + w, y + h}, frame_size);
      if (!clamped) continue;
      out.push_back({frame.index, *clamped, std::move(descriptor), score});
    }
  }
  return out;
}

DetectionTable detect_all(const SceneDataset& dataset, const DetectorConfig& config) {
  DetectionTable table;
  table.reserve(dataset.frames.size());
  for (const auto& frame : dataset.frames) {
    table.push_back(detect_regions(frame, config, dataset.frame_size()));
  }
  return table;
}

std::vector<std::optional<std::size_t>> match_to_ground_truth(
    std::span<const DetectionRecord> detections, std::span<const GtObject> truth,
    double iou_threshold) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
  for (std::size_t d = 0; d < detections.size(); ++d) {
    for (std::size_t g = 0; g < truth.size(); ++g) {
      const double v = iou(detections[d].box, truth[g].box);
      if (v >= iou_threshold) candidates.emplace_back(v, d, g);
    }
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<std::optional<std::size_t>> out(detections.size());
  std::vector<bool> used(truth.size(), false);
  for (const auto& [v, d, g] : candidates) {
    if (out[d] || used[g]) continue;
    out[d] = g;
    used[g] = true;
  }
  return out;
}

std::string detections_to_string(const DetectionTable& table) {
  std::vector<Json> records;
  for (const auto& frame : table) {
    for (const auto& det : frame) {
      Json r = make_record("detection");
      r["frame"] = det.frame;
      r["box"] = det.box;
      r["descriptor"] = det.descriptor;
      r["score"] = det.score ? Json(*det.score) : Json(nullptr);
      records.push_back(std::move(r));
    }
  }
  return to_jsonl(records);
}

void save_detections(const DetectionTable& table, const std::filesystem::path& path) {
  write_text_file(path, detections_to_string(table));
}

std::map<std::size_t, std::vector<DetectionRecord>> detections_from_string(
    const std::string& text) {
  std::map<std::size_t, std::vector<DetectionRecord>> out;
  std::optional<std::size_t> dim;
  for (const auto& line : parse_jsonl(text)) {
    if (field<std::string>(line, "record") != "detection") {
      throw ParseError("expected a detection record", line.line);
    }
    DetectionRecord det;
    det.frame = field<std::size_t>(line, "frame");
    det.box = field<BoundingBox>(line, "box");
    if (!det.box.valid()) throw ParseError("invalid detection box", line.line);
    det.descriptor = field<FeatureVector>(line, "descriptor");
    if (auto it = line.record.find("score"); it != line.record.end() && !it->is_null()) {
      det.score = field<double>(line, "score");
    }
    if (!dim) dim = det.descriptor.size();
    if (det.descriptor.size() != *dim) {
      throw InvalidDataset("line " + std::to_string(line.line) + ": descriptor length " +
                           std::to_string(det.descriptor.size()) + " differs from " +
                           std::to_string(*dim));
    }
    out[det.frame].push_back(std::move(det));
  }
  return out;
}

std::map<std::size_t, std::vector<DetectionRecord>> load_detections(
    const std::filesystem::path& path) {
  return detections_from_string(read_text_file(path));
}

}  // namespace gazeloop
