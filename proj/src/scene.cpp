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

#include "gazeloop/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

#include "gazeloop/errors.hpp"
#include "gazeloop/jsonl.hpp"
#include "gazeloop/rng.hpp"
#include "gazeloop/serialization.hpp"

namespace gazeloop {

namespace {

constexpr std::uint64_t kStreamFrames = 1;
constexpr std::uint64_t kStreamDrift = 2;
constexpr std::int64_t kNoTarget = std::numeric_limits<std::int64_t>::min();  // gaze on the background
constexpr std::uint64_t kStreamGaze = 3;

double sinusoid(double amplitude, const Motion& m, std::size_t frame) {
  return amplitude *
         std::sin(2.0 * std::numbers::pi * static_cast<double>(frame) / m.period_frames + m.phase);
}

struct ResolvedObject {
  std::string label;
  const FeatureVector* appearance;
  std::size_t drift_group;
};

// Labels and shared appearance after applying mirrored pairs.
std::vector<ResolvedObject> resolve_objects(const SceneConfig& config) {
  std::vector<ResolvedObject> out;
  for (std::size_t i = 0; i < config.objects.size(); ++i) {
    out.push_back({config.objects[i].class_label, &config.objects[i].appearance, i});
  }
  for (const auto& pair : config.mirrored_pairs) {
    const auto& a = config.objects[pair.first];
    const auto& b = config.objects[pair.second];
    const double ax = a.initial_box.center_x() + a.motion.dx(0);
    const double bx = b.initial_box.center_x() + b.motion.dx(0);
    const bool a_left = ax <= bx;
    out[pair.first].label = a.class_label + (a_left ? "-left" : "-right");
    out[pair.second].label = a.class_label + (a_left ? "-right" : "-left");
    out[pair.second].appearance = &a.appearance;
    out[pair.second].drift_group = pair.first;
  }
  return out;
}

}  // namespace

double Motion::dx(std::size_t frame) const {
  switch (kind) {
    case MotionKind::kStatic:
      return 0.0;
    case MotionKind::kLinear:
      return velocity_x * static_cast<double>(frame);
    case MotionKind::kSinusoidal:
      return sinusoid(amplitude_x, *this, frame);
  }
  return 0.0;
}

double Motion::dy(std::size_t frame) const {
  switch (kind) {
    case MotionKind::kStatic:
      return 0.0;
    case MotionKind::kLinear:
      return velocity_y * static_cast<double>(frame);
    case MotionKind::kSinusoidal:
      return sinusoid(amplitude_y, *this, frame);
  }
  return 0.0;
}

std::size_t SceneConfig::appearance_dim() const {
  return objects.empty() ? 0 : objects.front().appearance.size();
}

std::vector<std::string> SceneDataset::class_labels() const {
  std::set<std::string> labels;
  for (const auto& f : frames)
    for (const auto& o : f.objects) labels.insert(o.class_label);
  return {labels.begin(), labels.end()};
}

void validate(const SceneConfig& config) {
  if (config.frame_count == 0) throw std::invalid_argument("scene needs at least one frame");
  if (config.objects.empty()) throw std::invalid_argument("scene needs at least one object");
  if (!(config.fps > 0.0)) throw std::invalid_argument("fps must be positive");
  if (!(config.width > 0.0) || !(config.height > 0.0)) {
    throw std::invalid_argument("frame dimensions must be positive");
  }
  if (config.appearance_noise < 0.0 || config.camera_jitter < 0.0 ||
      config.appearance_drift < 0.0) {
    throw std::invalid_argument("noise parameters must be non-negative");
  }
  const std::size_t dim = config.appearance_dim();
  if (dim == 0) throw std::invalid_argument("appearance vectors must be non-empty");
  for (const auto& o : config.objects) {
    if (o.appearance.size() != dim) {
      throw std::invalid_argument("object '" + o.class_label + "' has appearance dim " +
                                  std::to_string(o.appearance.size()) + ", expected " +
                                  std::to_string(dim));
    }
    require_valid(o.initial_box, "initial_box");
    if (o.motion.kind == MotionKind::kSinusoidal && !(o.motion.period_frames > 0.0)) {
      throw std::invalid_argument("sinusoidal motion needs a positive period");
    }
  }
  if (config.camera.kind == MotionKind::kSinusoidal && !(config.camera.period_frames > 0.0)) {
    throw std::invalid_argument("sinusoidal camera motion needs a positive period");
  }
  std::set<std::size_t> paired;
  for (const auto& p : config.mirrored_pairs) {
    if (p.first >= config.objects.size() || p.second >= config.objects.size() ||
        p.first == p.second) {
      throw std::invalid_argument("mirrored pair references invalid objects");
    }
    if (!paired.insert(p.first).second || !paired.insert(p.second).second) {
      throw std::invalid_argument("object appears in more than one mirrored pair");
    }
  }
  if (!(config.gaze.background_probability >= 0.0 && config.gaze.background_probability <= 1.0)) {
    throw std::invalid_argument("gaze background probability must be in [0, 1]");
  }
  if (config.gaze.dwell_frames == 0) throw std::invalid_argument("gaze dwell must be >= 1 frame");
}

SceneDataset generate_scene(const SceneConfig& config) {
  validate(config);
  const auto resolved = resolve_objects(config);
  const std::size_t dim = config.appearance_dim();
  const FrameSize frame_size = config.frame_size();

  // One unit drift direction per appearance group.
  std::vector<FeatureVector> drift_dirs(config.objects.size());
  {
    auto rng = make_rng(config.seed, {kStreamDrift});
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& dir : drift_dirs) {
      dir.resize(dim);
      double norm = 0.0;
      for (double& v : dir) {
        v = normal(rng);
        norm += v * v;
      }
      norm = std::sqrt(norm);
      for (double& v : dir) v = norm > 0.0 ? v / norm : 0.0;
    }
  }

  SceneDataset dataset;
  dataset.config = config;
  auto rng = make_rng(config.seed, {kStreamFrames});
  std::normal_distribution<double> normal(0.0, 1.0);
  const double last = static_cast<double>(std::max<std::size_t>(config.frame_count - 1, 1));

  for (std::size_t t = 0; t < config.frame_count; ++t) {
    Frame frame;
    frame.index = t;
    frame.time_s = static_cast<double>(t) / config.fps;
    // Draw order is fixed per frame so the stream does not depend on visibility.
    const double jitter_x = config.camera_jitter * normal(rng);
    const double jitter_y = config.camera_jitter * normal(rng);
    const double cam_x = config.camera.dx(t) + jitter_x;
    const double cam_y = config.camera.dy(t) + jitter_y;
    const double drift_scale = config.appearance_drift * static_cast<double>(t) / last;

    for (std::size_t i = 0; i < config.objects.size(); ++i) {
      const auto& spec = config.objects[i];
      FeatureVector appearance(*resolved[i].appearance);
      const auto& dir = drift_dirs[resolved[i].drift_group];
      for (std::size_t d = 0; d < dim; ++d) {
        appearance[d] += drift_scale * dir[d] + config.appearance_noise * normal(rng);
      }
      if (t < spec.first_frame || (spec.last_frame && t > *spec.last_frame)) continue;
      const auto moved =
          spec.initial_box.translated(spec.motion.dx(t) + cam_x, spec.motion.dy(t) + cam_y);
      const auto clamped = clamp_to_frame(moved, frame_size, 2.0);
      if (!clamped) continue;
      frame.objects.push_back({resolved[i].label, static_cast<std::int64_t>(i + 1), *clamped,
                               std::move(appearance)});
    }
    dataset.frames.push_back(std::move(frame));
  }
  dataset.fixations = simulate_gaze(dataset, config.gaze, derive_seed(config.seed, kStreamGaze));
  return dataset;
}

std::vector<FixationPoint> simulate_gaze(const SceneDataset& dataset, const GazeConfig& gaze,
                                         std::uint64_t seed) {
  if (dataset.frames.empty()) return {};
  const FrameSize size = dataset.frame_size();
  auto rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t dwell = std::max<std::size_t>(gaze.dwell_frames, 1);

  std::int64_t target = kNoTarget;
  double anchor_x = 0.0;
  double anchor_y = 0.0;
  std::size_t dwell_left = 0;

  auto sample_background = [&](const Frame& frame) {
    double x = 0.0, y = 0.0;
    for (int attempt = 0; attempt < 200; ++attempt) {
      x = unit(rng) * size.width;
      y = unit(rng) * size.height;
      const bool inside = std::any_of(frame.objects.begin(), frame.objects.end(),
                                      [&](const GtObject& o) { return o.box.contains(x, y); });
      if (!inside) break;
    }
    anchor_x = x;
    anchor_y = y;
  };

  std::vector<FixationPoint> out;
  out.reserve(dataset.frames.size());
  for (const auto& frame : dataset.frames) {
    const auto find_target = [&]() -> const GtObject* {
      if (target == kNoTarget) return nullptr;
      for (const auto& o : frame.objects)
        if (o.instance_id == target) return &o;
      return nullptr;
    };
    if (dwell_left == 0 || (target != kNoTarget && find_target() == nullptr)) {
      dwell_left = dwell;
      if (frame.objects.empty() || unit(rng) < gaze.background_probability) {
        target = kNoTarget;
        sample_background(frame);
      } else {
        std::uniform_int_distribution<std::size_t> pick(0, frame.objects.size() - 1);
        target = frame.objects[pick(rng)].instance_id;
      }
    }
    --dwell_left;
    double x = anchor_x;
    double y = anchor_y;
    if (const GtObject* obj = find_target()) {
      x = obj->box.center_x();
      y = obj->box.center_y();
    }
    if (gaze.saccade_noise_px > 0.0) {
      x += gaze.saccade_noise_px * normal(rng);
      y += gaze.saccade_noise_px * normal(rng);
    }
    x = std::clamp(x, 0.0, size.width);
    y = std::clamp(y, 0.0, size.height);

    std::vector<LabeledBox> boxes;
    for (const auto& o : frame.objects) boxes.push_back({o.box, o.class_label});
    const auto hit = smallest_containing(boxes, x, y);
    out.push_back({frame.index, x, y, hit ? boxes[*hit].label : std::string(kBackground)});
  }
  return out;
}

std::string dataset_to_string(const SceneDataset& dataset) {
  std::vector<Json> records;
  Json header = make_record("scene_header");
  header["frame_count"] = dataset.frames.size();
  header["config"] = dataset.config;
  records.push_back(std::move(header));
  const bool with_fixations = dataset.fixations.size() == dataset.frames.size();
  for (std::size_t i = 0; i < dataset.frames.size(); ++i) {
    const auto& f = dataset.frames[i];
    Json r = make_record("frame");
    r["index"] = f.index;
    r["time_s"] = f.time_s;
    r["objects"] = f.objects;
    r["fixation"] = with_fixations ? Json(dataset.fixations[i]) : Json(nullptr);
    records.push_back(std::move(r));
  }
  return to_jsonl(records);
}

void save_dataset(const SceneDataset& dataset, const std::filesystem::path& path) {
  write_text_file(path, dataset_to_string(dataset));
}

SceneDataset dataset_from_string(const std::string& text) {
  const auto lines = parse_jsonl(text);
  if (lines.empty()) throw ParseError("empty dataset file", 0);
  const auto& head = lines.front();
  if (field<std::string>(head, "record") != "scene_header") {
    throw ParseError("first record must be scene_header", head.line);
  }
  SceneDataset dataset;
  dataset.config = field<SceneConfig>(head, "config");
  const auto expected = field<std::size_t>(head, "frame_count");
  if (expected == 0) throw InvalidDataset("dataset declares an empty frame list");

  bool all_fixations = true;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& line = lines[i];
    if (field<std::string>(line, "record") != "frame") {
      throw ParseError("expected a frame record", line.line);
    }
    Frame frame;
    frame.index = field<std::size_t>(line, "index");
    if (frame.index != dataset.frames.size()) {
      throw ParseError("frame index " + std::to_string(frame.index) + " out of sequence",
                       line.line);
    }
    frame.time_s = field<double>(line, "time_s");
    frame.objects = field<std::vector<GtObject>>(line, "objects");
    for (const auto& o : frame.objects) {
      if (!o.box.valid()) throw ParseError("invalid ground-truth box", line.line);
    }
    const auto& fix = line.record.find("fixation");
    if (fix != line.record.end() && !fix->is_null()) {
      dataset.fixations.push_back(field<FixationPoint>(line, "fixation"));
    } else {
      all_fixations = false;
    }
    dataset.frames.push_back(std::move(frame));
  }
  if (dataset.frames.empty()) throw InvalidDataset("dataset has an empty frame list");
  if (dataset.frames.size() != expected) {
    throw ParseError("truncated dataset: header declares " + std::to_string(expected) +
                         " frames, found " + std::to_string(dataset.frames.size()),
                     lines.back().line);
  }
  if (!all_fixations) dataset.fixations.clear();
  return dataset;
}

SceneDataset load_dataset(const std::filesystem::path& path) {
  return dataset_from_string(read_text_file(path));
}

}  // namespace gazeloop
