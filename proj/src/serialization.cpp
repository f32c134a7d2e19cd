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

#include "gazeloop/serialization.hpp"

#include <stdexcept>

#include "gazeloop/errors.hpp"

namespace gazeloop {

namespace {

template <typename T>
void read_optional(const Json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

const char* motion_kind_name(MotionKind kind) {
  switch (kind) {
    case MotionKind::kStatic:
      return "static";
    case MotionKind::kLinear:
      return "linear";
    case MotionKind::kSinusoidal:
      return "sinusoidal";
  }
  return "static";
}

MotionKind motion_kind_from(const std::string& name) {
  if (name == "static") return MotionKind::kStatic;
  if (name == "linear") return MotionKind::kLinear;
  if (name == "sinusoidal") return MotionKind::kSinusoidal;
  throw std::invalid_argument("unknown motion kind '" + name + "'");
}

}  // namespace

void to_json(Json& j, const BoundingBox& box) {
  j = Json::array({box.x_min, box.y_min, box.x_max, box.y_max});
}

void from_json(const Json& j, BoundingBox& box) {
  if (!j.is_array() || j.size() != 4) {
    throw std::invalid_argument("box must be an array of 4 numbers");
  }
  box = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

void to_json(Json& j, const DenseMatrix& m) {
  j = Json{{"rows", m.rows()}, {"cols", m.cols()}};
  j["values"] = std::vector<double>(m.values().begin(), m.values().end());
}

void from_json(const Json& j, DenseMatrix& m) {
  m = DenseMatrix(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(),
                  j.at("values").get<std::vector<double>>());
}

void to_json(Json& j, const Motion& m) {
  j = Json{{"kind", motion_kind_name(m.kind)}};
  switch (m.kind) {
    case MotionKind::kStatic:
      break;
    case MotionKind::kLinear:
      j["velocity"] = {m.velocity_x, m.velocity_y};
      break;
    case MotionKind::kSinusoidal:
      j["amplitude"] = {m.amplitude_x, m.amplitude_y};
      j["period_frames"] = m.period_frames;
      j["phase"] = m.phase;
      break;
  }
}

void from_json(const Json& j, Motion& m) {
  m = Motion{};
  m.kind = motion_kind_from(j.at("kind").get<std::string>());
  if (auto it = j.find("velocity"); it != j.end()) {
    m.velocity_x = it->at(0).get<double>();
    m.velocity_y = it->at(1).get<double>();
  }
  if (auto it = j.find("amplitude"); it != j.end()) {
    m.amplitude_x = it->at(0).get<double>();
    m.amplitude_y = it->at(1).get<double>();
  }
  read_optional(j, "period_frames", m.period_frames);
  read_optional(j, "phase", m.phase);
}

void to_json(Json& j, const ObjectSpec& o) {
  j = Json{{"class_label", o.class_label},
           {"appearance", o.appearance},
           {"initial_box", o.initial_box},
           {"motion", o.motion},
           {"first_frame", o.first_frame}};
  j["last_frame"] = o.last_frame ? Json(*o.last_frame) : Json(nullptr);
}

void from_json(const Json& j, ObjectSpec& o) {
  o = ObjectSpec{};
  o.class_label = j.at("class_label").get<std::string>();
  o.appearance = j.at("appearance").get<FeatureVector>();
  o.initial_box = j.at("initial_box").get<BoundingBox>();
  read_optional(j, "motion", o.motion);
  read_optional(j, "first_frame", o.first_frame);
  if (auto it = j.find("last_frame"); it != j.end() && !it->is_null()) {
    o.last_frame = it->get<std::size_t>();
  }
}

void to_json(Json& j, const MirroredPair& p) { j = Json::array({p.first, p.second}); }

void from_json(const Json& j, MirroredPair& p) {
  p = {j.at(0).get<std::size_t>(), j.at(1).get<std::size_t>()};
}

void to_json(Json& j, const GazeConfig& g) {
  j = Json{{"dwell_frames", g.dwell_frames},
           {"saccade_noise_px", g.saccade_noise_px},
           {"background_probability", g.background_probability}};
}

void from_json(const Json& j, GazeConfig& g) {
  g = GazeConfig{};
  read_optional(j, "dwell_frames", g.dwell_frames);
  read_optional(j, "saccade_noise_px", g.saccade_noise_px);
  read_optional(j, "background_probability", g.background_probability);
}

void to_json(Json& j, const SceneConfig& c) {
  j = Json{{"frame_count", c.frame_count},
           {"fps", c.fps},
           {"width", c.width},
           {"height", c.height},
           {"objects", c.objects},
           {"mirrored_pairs", c.mirrored_pairs},
           {"appearance_noise", c.appearance_noise},
           {"camera_jitter", c.camera_jitter},
           {"camera", c.camera},
           {"appearance_drift", c.appearance_drift},
           {"gaze", c.gaze},
           {"seed", c.seed}};
}

void from_json(const Json& j, SceneConfig& c) {
  c = SceneConfig{};
  read_optional(j, "frame_count", c.frame_count);
  read_optional(j, "fps", c.fps);
  read_optional(j, "width", c.width);
  read_optional(j, "height", c.height);
  c.objects = j.at("objects").get<std::vector<ObjectSpec>>();
  read_optional(j, "mirrored_pairs", c.mirrored_pairs);
  read_optional(j, "appearance_noise", c.appearance_noise);
  read_optional(j, "camera_jitter", c.camera_jitter);
  read_optional(j, "camera", c.camera);
  read_optional(j, "appearance_drift", c.appearance_drift);
  read_optional(j, "gaze", c.gaze);
  read_optional(j, "seed", c.seed);
}

void to_json(Json& j, const GtObject& o) {
  j = Json{{"label", o.class_label},
           {"instance_id", o.instance_id},
           {"box", o.box},
           {"appearance", o.appearance}};
}

void from_json(const Json& j, GtObject& o) {
  o.class_label = j.at("label").get<std::string>();
  o.instance_id = j.at("instance_id").get<std::int64_t>();
  o.box = j.at("box").get<BoundingBox>();
  o.appearance = j.at("appearance").get<FeatureVector>();
}

void to_json(Json& j, const FixationPoint& f) {
  j = Json{{"frame", f.frame}, {"x", f.x}, {"y", f.y}, {"aoi", f.aoi_label}};
}

void from_json(const Json& j, FixationPoint& f) {
  f.frame = j.at("frame").get<std::size_t>();
  f.x = j.at("x").get<double>();
  f.y = j.at("y").get<double>();
  f.aoi_label = j.at("aoi").get<std::string>();
}

void to_json(Json& j, const DetectorConfig& c) {
  j = Json{{"localization_jitter", c.localization_jitter},
           {"miss_probability", c.miss_probability},
           {"spurious_rate", c.spurious_rate},
           {"descriptor_noise", c.descriptor_noise},
           {"background_scale", c.background_scale},
           {"seed", c.seed}};
}

void from_json(const Json& j, DetectorConfig& c) {
  c = DetectorConfig{};
  read_optional(j, "localization_jitter", c.localization_jitter);
  read_optional(j, "miss_probability", c.miss_probability);
  read_optional(j, "spurious_rate", c.spurious_rate);
  read_optional(j, "descriptor_noise", c.descriptor_noise);
  read_optional(j, "background_scale", c.background_scale);
  read_optional(j, "seed", c.seed);
}

void to_json(Json& j, const DetectorSchedule& s) { j = Json{{"decay", s.decay}}; }

void from_json(const Json& j, DetectorSchedule& s) {
  s = DetectorSchedule{};
  read_optional(j, "decay", s.decay);
}

void to_json(Json& j, const VosConfig& c) {
  j = Json{{"gate_sigma_fraction", c.gate_sigma_fraction},
           {"match_threshold", c.match_threshold},
           {"memory_decay", c.memory_decay},
           {"velocity_smoothing", c.velocity_smoothing},
           {"capacity", c.capacity},
           {"max_age", c.max_age},
           {"seed_iou", c.seed_iou}};
}

void from_json(const Json& j, VosConfig& c) {
  c = VosConfig{};
  read_optional(j, "gate_sigma_fraction", c.gate_sigma_fraction);
  read_optional(j, "match_threshold", c.match_threshold);
  read_optional(j, "memory_decay", c.memory_decay);
  read_optional(j, "velocity_smoothing", c.velocity_smoothing);
  read_optional(j, "capacity", c.capacity);
  read_optional(j, "max_age", c.max_age);
  read_optional(j, "seed_iou", c.seed_iou);
}

void to_json(Json& j, const TrainConfig& c) {
  j = Json{{"epochs", c.epochs},
           {"learning_rate", c.learning_rate},
           {"seed", c.seed},
           {"early_stop_tolerance", c.early_stop_tolerance},
           {"patience", c.patience},
           {"batch_size", c.batch_size}};
}

void from_json(const Json& j, TrainConfig& c) {
  c = TrainConfig{};
  read_optional(j, "epochs", c.epochs);
  read_optional(j, "learning_rate", c.learning_rate);
  read_optional(j, "seed", c.seed);
  read_optional(j, "early_stop_tolerance", c.early_stop_tolerance);
  read_optional(j, "patience", c.patience);
  read_optional(j, "batch_size", c.batch_size);
}

void to_json(Json& j, const ImpnArchitecture& a) {
  j = Json{{"hidden_dim", a.hidden_dim},
           {"depth", a.depth},
           {"aggregator", aggregator_name(a.aggregator)}};
}

void from_json(const Json& j, ImpnArchitecture& a) {
  a = ImpnArchitecture{};
  read_optional(j, "hidden_dim", a.hidden_dim);
  read_optional(j, "depth", a.depth);
  if (auto it = j.find("aggregator"); it != j.end()) {
    a.aggregator = aggregator_from_name(it->get<std::string>());
  }
}

void to_json(Json& j, const AnnotatedRegion& r) {
  j = Json{{"frame", r.frame},
           {"box", r.box},
           {"label", r.label},
           {"instance", r.instance_id},
           {"source", region_source_name(r.source)}};
}

void from_json(const Json& j, AnnotatedRegion& r) {
  r = AnnotatedRegion{};
  r.frame = j.at("frame").get<std::size_t>();
  r.box = j.at("box").get<BoundingBox>();
  require_valid(r.box, "region box");
  r.label = j.at("label").get<std::string>();
  read_optional(j, "instance", r.instance_id);
  r.source = RegionSource::kUser;
  if (auto it = j.find("source"); it != j.end()) {
    r.source = region_source_from_name(it->get<std::string>());
  }
}

void to_json(Json& j, const MetricsReport& m) {
  Json per_class = Json::object();
  for (const auto& [label, aps] : m.per_class_ap) {
    Json row = Json::array();
    for (const auto& ap : aps) row.push_back(ap ? Json(*ap) : Json(nullptr));
    per_class[label] = std::move(row);
  }
  j = Json{{"frames", m.frames},
           {"map50", m.map50},
           {"map75", m.map75},
           {"map", m.map},
           {"balanced_accuracy", m.balanced_accuracy},
           {"fixation_accuracy",
            m.fixation_accuracy ? Json(*m.fixation_accuracy) : Json(nullptr)},
           {"per_class_ap", std::move(per_class)}};
}

void from_json(const Json& j, MetricsReport& m) {
  m = MetricsReport{};
  m.frames = j.at("frames").get<std::size_t>();
  m.map50 = j.at("map50").get<double>();
  m.map75 = j.at("map75").get<double>();
  m.map = j.at("map").get<double>();
  m.balanced_accuracy = j.at("balanced_accuracy").get<double>();
  if (const auto& f = j.at("fixation_accuracy"); !f.is_null()) m.fixation_accuracy = f.get<double>();
  for (const auto& [label, row] : j.at("per_class_ap").items()) {
    auto& aps = m.per_class_ap[label];
    for (const auto& v : row) {
      aps.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    }
  }
}

void to_json(Json& j, const HilConfig& c) {
  j = Json{{"t_initial_s", c.t_initial_s},
           {"t_update_s", c.t_update_s},
           {"max_update", c.max_update},
           {"fps", c.fps},
           {"architecture", c.architecture},
           {"train", c.train},
           {"detector", c.detector},
           {"schedule", c.schedule},
           {"vos", c.vos},
           {"warm_start", c.warm_start},
           {"test_split", c.test_split}};
}

void from_json(const Json& j, HilConfig& c) {
  c = HilConfig{};
  read_optional(j, "t_initial_s", c.t_initial_s);
  read_optional(j, "t_update_s", c.t_update_s);
  read_optional(j, "max_update", c.max_update);
  read_optional(j, "fps", c.fps);
  read_optional(j, "architecture", c.architecture);
  read_optional(j, "train", c.train);
  read_optional(j, "detector", c.detector);
  read_optional(j, "schedule", c.schedule);
  read_optional(j, "vos", c.vos);
  read_optional(j, "warm_start", c.warm_start);
  read_optional(j, "test_split", c.test_split);
}

void save_hil_config(const HilConfig& config, const std::filesystem::path& path) {
  Json j = make_record("hil_config");
  j["config"] = config;
  write_text_file(path, to_jsonl({j}));
}

HilConfig load_hil_config(const std::filesystem::path& path) {
  const auto lines = parse_jsonl(read_text_file(path));
  if (lines.size() != 1 || lines[0].record.value("record", "") != "hil_config") {
    throw ParseError("expected a single hil_config record", lines.empty() ? 0 : lines[0].line);
  }
  auto config = field<HilConfig>(lines[0], "config");
  try {
    validate(config);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("config: ") + e.what(), lines[0].line);
  }
  return config;
}

}  // namespace gazeloop
