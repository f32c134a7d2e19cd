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

#include "gazeloop/hil.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>

#include "gazeloop/errors.hpp"
#include "gazeloop/rng.hpp"
#include "gazeloop/serialization.hpp"

namespace gazeloop {

namespace {

std::vector<DetectionRecord> as_records(std::span<const AnnotatedRegion> regions) {
  std::vector<DetectionRecord> out;
  out.reserve(regions.size());
  for (const auto& r : regions) out.push_back({r.frame, r.box, {}, std::nullopt});
  return out;
}

std::vector<AnnotatedRegion> foreground(std::span<const AnnotatedRegion> regions) {
  std::vector<AnnotatedRegion> out;
  for (const auto& r : regions)
    if (r.label != kBackground) out.push_back(r);
  return out;
}

std::vector<GtObject> as_objects(std::span<const AnnotatedRegion> regions) {
  std::vector<GtObject> out;
  for (const auto& r : regions) out.push_back({r.label, r.instance_id, r.box, {}});
  return out;
}

std::size_t frames_for(double seconds, double fps) {
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(seconds * fps)));
}

const char* event_type_name(EventType t) { return t == EventType::kFeedback ? "feedback" : "advance"; }
const char* event_stage_name(EventStage s) {
  return s == EventStage::kAnnotation ? "annotation" : "inference";
}

void settle(HilSession& session) {
  if (session.training_pending()) session.finish_training(run_training(session.take_training_job()));
}

ImpnArchitecture session_architecture(const HilConfig& config, const SceneDataset& dataset) {
  ImpnArchitecture arch = config.architecture;
  arch.input_dim = kCoordinateFeatures + dataset.config.appearance_dim();
  arch.class_labels = session_labels(dataset);
  return arch;
}

}  // namespace

std::size_t count_edits(std::span<const AnnotatedRegion> shown,
                        std::span<const AnnotatedRegion> annotated) {
  const auto before = foreground(shown);
  const auto after = foreground(annotated);
  const auto match = match_to_ground_truth(as_records(after), as_objects(before), 0.5);
  std::vector<bool> used(before.size(), false);
  std::size_t edits = 0;
  for (std::size_t i = 0; i < after.size(); ++i) {
    if (!match[i]) {
      ++edits;
      continue;
    }
    used[*match[i]] = true;
    if (before[*match[i]].label != after[i].label) ++edits;
  }
  edits += static_cast<std::size_t>(std::count(used.begin(), used.end(), false));
  return edits;
}

std::vector<AnnotatedRegion> regions_from_predictions(const PredictionSet& predictions,
                                                      std::size_t frame) {
  std::vector<AnnotatedRegion> out;
  for (std::size_t i = 0; i < predictions.nodes.size(); ++i) {
    const auto& node = predictions.nodes[i];
    out.push_back({frame, node.box, node.label, static_cast<std::int64_t>(i + 1),
                   RegionSource::kPropagated});
  }
  return out;
}

OracleUser::OracleUser(const SceneDataset& dataset, OracleConfig config)
    : dataset_(dataset), config_(config) {
  if (!(config.correction_noise >= 0.0)) throw std::invalid_argument("correction noise must be >= 0");
}

bool OracleUser::satisfied(std::size_t frame, std::span<const AnnotatedRegion> shown) {
  if (config_.always_satisfied) return true;
  if (frame >= dataset_.frames.size()) throw std::invalid_argument("frame out of range");
  const auto& objects = dataset_.frames[frame].objects;
  const auto match = match_to_ground_truth(as_records(shown), objects, 0.5);
  std::vector<bool> covered(objects.size(), false);
  for (std::size_t i = 0; i < shown.size(); ++i) {
    const std::string& expected = match[i] ? objects[*match[i]].class_label : kBackground;
    if (shown[i].label != expected) return false;
    if (match[i]) covered[*match[i]] = true;
  }
  return std::all_of(covered.begin(), covered.end(), [](bool c) { return c; });
}

std::optional<std::vector<AnnotatedRegion>> OracleUser::annotate(
    std::size_t frame, std::span<const AnnotatedRegion> shown) {
  if (frame >= dataset_.frames.size()) throw std::invalid_argument("frame out of range");
  const auto& objects = dataset_.frames[frame].objects;
  const auto match = match_to_ground_truth(as_records(shown), objects, 0.5);
  std::vector<std::optional<std::size_t>> kept(objects.size());
  for (std::size_t i = 0; i < shown.size(); ++i) {
    if (match[i] && shown[i].label == objects[*match[i]].class_label) kept[*match[i]] = i;
  }
  std::vector<AnnotatedRegion> out;
  for (std::size_t j = 0; j < objects.size(); ++j) {
    AnnotatedRegion r{frame, objects[j].box, objects[j].class_label, objects[j].instance_id,
                      RegionSource::kUser};
    if (kept[j]) {
      r.box = shown[*kept[j]].box;
    } else if (config_.correction_noise > 0.0) {
      auto rng = make_rng(config_.seed, {frame, j});
      std::normal_distribution<double> noise(0.0, config_.correction_noise);
      BoundingBox b = objects[j].box;
      b.x_min += noise(rng);
      b.y_min += noise(rng);
      b.x_max += noise(rng);
      b.y_max += noise(rng);
      if (b.valid()) {
        if (auto c = clamp_to_frame(b, dataset_.frame_size())) r.box = *c;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

ScriptedUser::ScriptedUser(std::map<std::size_t, std::vector<AnnotatedRegion>> script)
    : script_(std::move(script)) {}

bool ScriptedUser::satisfied(std::size_t frame, std::span<const AnnotatedRegion>) {
  return !script_.contains(frame);
}

std::optional<std::vector<AnnotatedRegion>> ScriptedUser::annotate(
    std::size_t frame, std::span<const AnnotatedRegion> shown) {
  if (auto it = script_.find(frame); it != script_.end()) return it->second;
  return std::vector<AnnotatedRegion>(shown.begin(), shown.end());
}

AnnotationWindow::AnnotationWindow(std::size_t first, std::size_t last,
                                   const DetectionTable& detections, const VosConfig& vos,
                                   FrameSize frame_size, std::vector<AnnotatedRegion> initial)
    : first_(first), last_(last), current_(first), detections_(detections),
      memory_(vos, frame_size), shown_(std::move(initial)) {
  if (first >= last) throw std::invalid_argument("annotation window is empty");
  if (last > detections.size()) throw std::invalid_argument("annotation window exceeds the video");
  for (auto& r : shown_) r.frame = first;
}

std::size_t AnnotationWindow::submit(std::vector<AnnotatedRegion> regions) {
  if (done()) throw std::logic_error("annotation window is finished");
  const std::size_t edits = count_edits(shown_, regions);
  seed_memory(memory_, regions, detections_[current_]);
  annotations_[current_] = std::move(regions);
  step();
  return edits;
}

void AnnotationWindow::accept() {
  if (done()) throw std::logic_error("annotation window is finished");
  if (current_ == first_) seed_memory(memory_, shown_, detections_[current_]);
  annotations_[current_] = shown_;
  step();
}

void AnnotationWindow::step() {
  ++current_;
  if (done()) {
    shown_.clear();
    return;
  }
  shown_ = propagate_frame(memory_, current_, detections_[current_]);
}

AnnotationResult interactive_annotation(std::size_t first, std::size_t last,
                                        const DetectionTable& detections, FrameSize frame_size,
                                        const VosConfig& vos, UserAgent& user,
                                        std::vector<AnnotatedRegion> initial) {
  AnnotationWindow window(first, last, detections, vos, frame_size, std::move(initial));
  AnnotationResult result;
  while (!window.done()) {
    const std::size_t frame = window.current_frame();
    const bool seed = frame == first;
    if (!seed && user.satisfied(frame, window.shown())) {
      result.events.push_back({result.events.size(), EventType::kAdvance,
                               EventStage::kAnnotation, frame, {}, 0});
      window.accept();
      continue;
    }
    auto regions = user.annotate(frame, window.shown());
    if (!regions) {
      result.aborted = true;
      break;
    }
    TraceEvent event{result.events.size(), EventType::kFeedback, EventStage::kAnnotation, frame,
                     *regions, 0};
    event.edits = window.submit(std::move(*regions));
    result.actions += event.edits;
    if (!seed) ++result.corrections;
    result.events.push_back(std::move(event));
  }
  result.annotations = window.annotations();
  return result;
}

EngagementSummary count_user_actions(std::span<const TraceEvent> trace,
                                     const SceneDataset& dataset) {
  EngagementSummary out;
  std::set<std::size_t> frames;
  for (const auto& e : trace) {
    if (e.type == EventType::kFeedback) out.actions += e.edits;
    if (e.stage == EventStage::kAnnotation || e.type == EventType::kFeedback) frames.insert(e.frame);
  }
  for (std::size_t f : frames) {
    if (f >= dataset.frames.size()) throw std::invalid_argument("trace frame out of range");
    out.per_frame_baseline += dataset.frames[f].objects.size();
  }
  out.ratio = out.per_frame_baseline == 0
                  ? 0.0
                  : static_cast<double>(out.actions) / static_cast<double>(out.per_frame_baseline);
  return out;
}

void validate(const HilConfig& config) {
  if (!(config.t_initial_s > 0.0)) throw std::invalid_argument("t_initial must be > 0");
  if (!(config.t_update_s > 0.0)) throw std::invalid_argument("t_update must be > 0");
  if (!(config.fps >= 0.0)) throw std::invalid_argument("fps must be >= 0");
  if (!(config.test_split > 0.0 && config.test_split < 1.0)) {
    throw std::invalid_argument("test split must lie in (0, 1)");
  }
  validate(config.train);
  validate(config.detector);
  validate(config.vos);
  if (!(config.schedule.decay > 0.0 && config.schedule.decay <= 1.0)) {
    throw std::invalid_argument("detector schedule decay must lie in (0, 1]");
  }
}

std::string report_to_string(const SessionReport& report) {
  std::vector<Json> records;
  Json header = make_record("session_report");
  header["method"] = report.method;
  header["frame_count"] = report.frame_count;
  header["rounds"] = report.rounds.size();
  records.push_back(std::move(header));
  for (const auto& r : report.rounds) {
    Json j = make_record("round");
    j["round"] = r.round;
    j["frames_annotated"] = r.frames_annotated;
    j["percent_data"] = r.percent_data;
    j["user_actions"] = r.user_actions;
    j["whole"] = r.whole;
    j["test"] = r.test;
    records.push_back(std::move(j));
  }
  return to_jsonl(records);
}

SessionReport report_from_string(const std::string& text) {
  const auto lines = parse_jsonl(text);
  if (lines.empty() || lines[0].record.value("record", "") != "session_report") {
    throw ParseError("report must start with a session_report record", lines.empty() ? 0 : 1);
  }
  SessionReport report;
  report.method = field<std::string>(lines[0], "method");
  report.frame_count = field<std::size_t>(lines[0], "frame_count");
  const auto count = field<std::size_t>(lines[0], "rounds");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto& l = lines[i];
    if (l.record.value("record", "") != "round") throw ParseError("expected a round record", l.line);
    RoundReport r;
    r.round = field<std::size_t>(l, "round");
    r.frames_annotated = field<std::size_t>(l, "frames_annotated");
    r.percent_data = field<double>(l, "percent_data");
    r.user_actions = field<std::size_t>(l, "user_actions");
    r.whole = field<MetricsReport>(l, "whole");
    r.test = field<MetricsReport>(l, "test");
    report.rounds.push_back(std::move(r));
  }
  if (report.rounds.size() != count) {
    throw ParseError("report announces " + std::to_string(count) + " rounds but holds " +
                         std::to_string(report.rounds.size()),
                     lines.back().line);
  }
  return report;
}

void save_report(const SessionReport& report, const std::filesystem::path& path) {
  write_text_file(path, report_to_string(report));
}

SessionReport load_report(const std::filesystem::path& path) {
  return report_from_string(read_text_file(path));
}

std::string trace_to_string(std::span<const TraceEvent> trace) {
  std::vector<Json> records;
  for (const auto& e : trace) {
    Json j = make_record("trace_event");
    j["seq"] = e.seq;
    j["type"] = event_type_name(e.type);
    j["stage"] = event_stage_name(e.stage);
    j["frame"] = e.frame;
    if (e.type == EventType::kFeedback) j["regions"] = e.regions;
    j["edits"] = e.edits;
    records.push_back(std::move(j));
  }
  return to_jsonl(records);
}

std::vector<TraceEvent> trace_from_string(const std::string& text) {
  std::vector<TraceEvent> out;
  for (const auto& l : parse_jsonl(text)) {
    if (l.record.value("record", "") != "trace_event") {
      throw ParseError("expected a trace_event record", l.line);
    }
    TraceEvent e;
    e.seq = field<std::size_t>(l, "seq");
    const auto type = field<std::string>(l, "type");
    if (type == "feedback") {
      e.type = EventType::kFeedback;
    } else if (type != "advance") {
      throw_field_error(l.line, "type", ("unknown event type '" + type + "'").c_str());
    }
    const auto stage = field<std::string>(l, "stage");
    if (stage == "inference") {
      e.stage = EventStage::kInference;
    } else if (stage != "annotation") {
      throw_field_error(l.line, "stage", ("unknown stage '" + stage + "'").c_str());
    }
    e.frame = field<std::size_t>(l, "frame");
    if (e.type == EventType::kFeedback) e.regions = field<std::vector<AnnotatedRegion>>(l, "regions");
    e.edits = field<std::size_t>(l, "edits");
    out.push_back(std::move(e));
  }
  return out;
}

void save_trace(std::span<const TraceEvent> trace, const std::filesystem::path& path) {
  write_text_file(path, trace_to_string(trace));
}

std::vector<TraceEvent> load_trace(const std::filesystem::path& path) {
  return trace_from_string(read_text_file(path));
}

std::vector<std::string> session_labels(const SceneDataset& dataset) {
  std::vector<std::string> labels{kBackground};
  for (auto& l : dataset.class_labels())
    if (l != kBackground) labels.push_back(std::move(l));
  return labels;
}

LabeledGraph label_detections(std::span<const DetectionRecord> detections,
                              std::span<const AnnotatedRegion> regions, FrameSize frame_size,
                              std::span<const std::string> class_labels) {
  std::vector<std::string> labels;
  labels.reserve(detections.size());
  for (const auto& det : detections) {
    const AnnotatedRegion* best = nullptr;
    double best_iou = 0.5;
    for (const auto& r : regions) {
      const double o = iou(det.box, r.box);
      if (o >= best_iou) {
        best_iou = o;
        best = &r;
      }
    }
    labels.push_back(best ? best->label : std::string(kBackground));
  }
  return make_labeled_graph(detections, frame_size, labels, class_labels);
}

std::vector<FramePrediction> predict_frames(const ImpnModel& model, const DetectionTable& detections,
                                            FrameSize frame_size, std::size_t first,
                                            std::size_t last) {
  std::vector<FramePrediction> out;
  for (std::size_t f = first; f < last; ++f) {
    out.push_back({f, forward(build_frame_graph(detections[f], frame_size), model)});
  }
  return out;
}

TrainingResult run_training(const TrainingJob& job) {
  const auto start = std::chrono::steady_clock::now();
  FitResult fitted = job.initial ? fit_from(job.data, *job.initial, job.train)
                                 : fit(job.data, job.architecture, job.train);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const SceneDataset& dataset = *job.dataset;
  const auto preds = predict_frames(fitted.model, *job.detections, dataset.frame_size(), 0,
                                    dataset.frames.size());
  TrainingResult result;
  result.round = job.round;
  result.whole = evaluate(dataset, preds);
  result.test = evaluate(dataset, std::span(preds).subspan(job.test_start));
  result.model = std::move(fitted.model);
  result.seconds = seconds;
  return result;
}

HilSession::HilSession(std::shared_ptr<const SceneDataset> dataset, HilConfig config,
                       std::uint64_t model_seed)
    : dataset_(std::move(dataset)), config_(std::move(config)), model_seed_(model_seed) {
  if (!dataset_) throw std::invalid_argument("session needs a dataset");
  validate(config_);
  const std::size_t n = dataset_->frames.size();
  const double fps = config_.fps > 0.0 ? config_.fps : dataset_->config.fps;
  initial_frames_ = frames_for(config_.t_initial_s, fps);
  update_frames_ = frames_for(config_.t_update_s, fps);
  if (initial_frames_ >= n) {
    throw std::invalid_argument("dataset must be longer than the initial annotation window");
  }
  test_start_ = static_cast<std::size_t>(std::floor(config_.test_split * static_cast<double>(n)));
  if (test_start_ == 0 || test_start_ >= n) throw std::invalid_argument("test split leaves no frames");
  labels_ = session_labels(*dataset_);
  report_.method = "hil";
  report_.frame_count = n;
  detections_ = std::make_shared<const DetectionTable>(
      detect_all(*dataset_, detector_for_round(config_.detector, config_.schedule, 0)));
  open_window(0, {});
}

std::size_t HilSession::frame_index() const {
  if (stage_ == Stage::kAnnotation) return window_->current_frame();
  return frame_index_;
}

bool HilSession::at_window_start() const {
  return stage_ == Stage::kAnnotation && window_->current_frame() == window_->first();
}

std::vector<AnnotatedRegion> HilSession::shown() const {
  switch (stage_) {
    case Stage::kAnnotation:
      return window_->shown();
    case Stage::kInference:
      return regions_from_predictions(predictions(frame_index_), frame_index_);
    default:
      return {};
  }
}

PredictionSet HilSession::predictions(std::size_t frame) const {
  if (!model_) throw std::logic_error("no model has been trained yet");
  if (frame >= detections_->size()) throw std::invalid_argument("frame out of range");
  return forward(build_frame_graph((*detections_)[frame], dataset_->frame_size()), *model_);
}

void HilSession::check_regions(std::size_t frame,
                               const std::vector<AnnotatedRegion>& regions) const {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    const auto& r = regions[i];
    const std::string where = "regions[" + std::to_string(i) + "]";
    if (r.frame != frame) throw std::invalid_argument(where + ".frame differs from the feedback frame");
    if (!r.box.valid()) throw std::invalid_argument(where + ".box is not a valid box");
    if (std::find(labels_.begin(), labels_.end(), r.label) == labels_.end()) {
      throw std::invalid_argument(where + ".label '" + r.label + "' is not a session label");
    }
  }
}

void HilSession::record(EventType type, EventStage stage, std::size_t frame,
                        std::vector<AnnotatedRegion> regions, std::size_t edits) {
  trace_.push_back({trace_.size(), type, stage, frame, std::move(regions), edits});
}

void HilSession::open_window(std::size_t first, std::vector<AnnotatedRegion> initial) {
  const std::size_t n = dataset_->frames.size();
  const std::size_t last =
      first == 0 && rounds_.empty() ? initial_frames_ : std::min(n, first + update_frames_ + 1);
  window_.emplace(first, last, *detections_, config_.vos, dataset_->frame_size(),
                  std::move(initial));
  stage_ = Stage::kAnnotation;
}

void HilSession::close_window() {
  for (const auto& [f, regions] : window_->annotations()) annotations_[f] = regions;
  resume_index_ = window_->last();
  window_.reset();

  const std::size_t round = rounds_.size();
  if (round > 0) {
    detections_ = std::make_shared<const DetectionTable>(
        detect_all(*dataset_, detector_for_round(config_.detector, config_.schedule, round)));
  }
  TrainingJob job;
  job.round = round;
  job.architecture = session_architecture(config_, *dataset_);
  job.train = config_.train;
  job.train.seed = derive_seed(model_seed_, round);
  if (config_.warm_start && model_) job.initial = *model_;
  for (const auto& [f, regions] : annotations_) {
    job.data.push_back(
        label_detections((*detections_)[f], regions, dataset_->frame_size(), labels_));
  }
  job.dataset = dataset_;
  job.detections = detections_;
  job.test_start = test_start_;
  job_ = std::move(job);
  stage_ = Stage::kTraining;
}

StepResult HilSession::feedback(std::size_t frame, std::vector<AnnotatedRegion> regions) {
  if (stage_ == Stage::kTraining) throw std::logic_error("training is in progress");
  if (stage_ == Stage::kDone) return {false, false, frame_index()};
  if (frame != frame_index()) {
    throw std::invalid_argument("feedback targets frame " + std::to_string(frame) +
                                " but the session is at frame " + std::to_string(frame_index()));
  }
  check_regions(frame, regions);
  EventStage stage = EventStage::kAnnotation;
  if (stage_ == Stage::kInference) {
    if (update_time_ >= config_.max_update) return {false, false, frame_index()};
    ++update_time_;
    stage = EventStage::kInference;
    open_window(frame, shown());
  }
  auto copy = regions;
  const std::size_t edits = window_->submit(std::move(regions));
  actions_ += edits;
  record(EventType::kFeedback, stage, frame, std::move(copy), edits);
  bool scheduled = false;
  if (window_->done()) {
    close_window();
    scheduled = true;
  }
  return {true, scheduled, frame_index()};
}

StepResult HilSession::advance() {
  if (stage_ == Stage::kTraining) throw std::logic_error("training is in progress");
  if (stage_ == Stage::kDone) return {false, false, frame_index()};
  const std::size_t frame = frame_index();
  if (stage_ == Stage::kAnnotation) {
    record(EventType::kAdvance, EventStage::kAnnotation, frame, {}, 0);
    window_->accept();
    if (window_->done()) {
      close_window();
      return {true, true, frame_index()};
    }
    return {true, false, frame_index()};
  }
  record(EventType::kAdvance, EventStage::kInference, frame, {}, 0);
  if (++frame_index_ >= dataset_->frames.size()) stage_ = Stage::kDone;
  return {true, false, frame_index()};
}

TrainingJob HilSession::take_training_job() {
  if (!job_) throw std::logic_error("no training job is pending");
  TrainingJob job = std::move(*job_);
  job_.reset();
  return job;
}

void HilSession::finish_training(TrainingResult result) {
  if (stage_ != Stage::kTraining || job_) throw std::logic_error("no training job was taken");
  if (result.round != rounds_.size()) throw std::logic_error("training result is for another round");
  model_ = std::make_shared<const ImpnModel>(std::move(result.model));
  rounds_.push_back(result.round);
  RoundReport r;
  r.round = result.round;
  r.frames_annotated = annotations_.size();
  r.percent_data =
      static_cast<double>(annotations_.size()) / static_cast<double>(dataset_->frames.size());
  r.user_actions = actions_;
  r.whole = std::move(result.whole);
  r.test = std::move(result.test);
  report_.rounds.push_back(std::move(r));
  seconds_.push_back(result.seconds);
  frame_index_ = resume_index_;
  stage_ = frame_index_ >= dataset_->frames.size() ? Stage::kDone : Stage::kInference;
}

HilOutcome run_hil_session(std::shared_ptr<const SceneDataset> dataset, const HilConfig& config,
                           UserAgent& user, std::uint64_t model_seed) {
  HilSession session(std::move(dataset), config, model_seed);
  HilOutcome out;
  while (!session.done()) {
    settle(session);
    if (session.done()) break;
    const std::size_t frame = session.frame_index();
    const auto shown = session.shown();
    bool give_feedback = false;
    if (session.stage() == HilSession::Stage::kAnnotation) {
      give_feedback = session.at_window_start() || !user.satisfied(frame, shown);
    } else {
      give_feedback = session.updates_remaining() > 0 && !user.satisfied(frame, shown);
    }
    if (!give_feedback) {
      session.advance();
      continue;
    }
    auto regions = user.annotate(frame, shown);
    if (!regions) {
      out.aborted = true;
      break;
    }
    session.feedback(frame, std::move(*regions));
  }
  settle(session);
  out.report = session.report();
  out.trace = session.trace();
  out.training_seconds = session.training_seconds();
  return out;
}

HilOutcome replay_trace(std::shared_ptr<const SceneDataset> dataset, const HilConfig& config,
                        std::span<const TraceEvent> trace, std::uint64_t model_seed) {
  HilSession session(std::move(dataset), config, model_seed);
  for (const auto& e : trace) {
    settle(session);
    if (e.frame != session.frame_index() || session.done()) {
      throw std::invalid_argument("trace event " + std::to_string(e.seq) + " targets frame " +
                                  std::to_string(e.frame) + " but the session is at frame " +
                                  std::to_string(session.frame_index()));
    }
    const StepResult r = e.type == EventType::kFeedback ? session.feedback(e.frame, e.regions)
                                                        : session.advance();
    if (!r.accepted) {
      throw std::invalid_argument("trace event " + std::to_string(e.seq) + " was rejected");
    }
  }
  settle(session);
  return {session.report(), session.trace(), session.training_seconds(), false};
}

SessionReport run_cml_baseline(const SceneDataset& dataset, const HilConfig& config, double split,
                               std::uint64_t model_seed) {
  validate(config);
  const std::size_t n = dataset.frames.size();
  if (n < 10) throw std::invalid_argument("baseline needs at least 10 frames");
  if (!(split > 0.0 && split < 1.0)) throw std::invalid_argument("split must lie in (0, 1)");
  const auto cut = static_cast<std::size_t>(std::floor(split * static_cast<double>(n)));
  if (cut == 0 || cut >= n) throw std::invalid_argument("split leaves an empty side");

  auto shared = std::make_shared<const SceneDataset>(dataset);
  auto detections = std::make_shared<const DetectionTable>(detect_all(
      dataset, detector_for_round(config.detector, config.schedule, config.max_update)));
  const auto labels = session_labels(dataset);
  TrainingJob job;
  job.round = 0;
  job.architecture = session_architecture(config, dataset);
  job.train = config.train;
  job.train.seed = derive_seed(model_seed, 0);
  std::size_t actions = 0;
  for (std::size_t f = 0; f < cut; ++f) {
    const auto& dets = (*detections)[f];
    const auto& objects = dataset.frames[f].objects;
    const auto match = match_to_ground_truth(dets, objects, 0.5);
    std::vector<std::string> names;
    for (const auto& m : match) names.push_back(m ? objects[*m].class_label : kBackground);
    job.data.push_back(make_labeled_graph(dets, dataset.frame_size(), names, labels));
    actions += objects.size();
  }
  job.dataset = shared;
  job.detections = detections;
  job.test_start = cut;
  TrainingResult result = run_training(job);

  SessionReport report;
  report.method = "cml";
  report.frame_count = n;
  RoundReport r;
  r.frames_annotated = cut;
  r.percent_data = static_cast<double>(cut) / static_cast<double>(n);
  r.user_actions = actions;
  r.whole = std::move(result.whole);
  r.test = std::move(result.test);
  report.rounds.push_back(std::move(r));
  return report;
}

}  // namespace gazeloop
