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

// Human-in-the-loop training. An annotation window seeds a region memory from
// the user's annotation of its first frame and propagates it forward, with
// the user correcting frames they are unhappy with. A session trains an
// initial model from one such window, then streams inference and opens a new
// window (followed by retraining) whenever the user rejects a frame, up to
// max_update times.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeloop/impn.hpp"
#include "gazeloop/jsonl.hpp"
#include "gazeloop/metrics.hpp"
#include "gazeloop/proposals.hpp"
#include "gazeloop/scene.hpp"
#include "gazeloop/vos.hpp"

namespace gazeloop {

/// Number of user actions needed to turn `shown` into `annotated`: boxes drawn,
/// relabelled or deleted. Background regions on either side are ignored;
/// regions are paired by greedy IoU >= 0.5.
std::size_t count_edits(std::span<const AnnotatedRegion> shown,
                        std::span<const AnnotatedRegion> annotated);

/// Every node as a region, background included. Instance ids are 1-based node
/// positions.
std::vector<AnnotatedRegion> regions_from_predictions(const PredictionSet& predictions,
                                                      std::size_t frame);

class UserAgent {
 public:
  virtual ~UserAgent() = default;
  /// Whether the regions shown for `frame` are acceptable.
  virtual bool satisfied(std::size_t frame, std::span<const AnnotatedRegion> shown) = 0;
  /// The user's annotation of `frame`, or nullopt to abort.
  virtual std::optional<std::vector<AnnotatedRegion>> annotate(
      std::size_t frame, std::span<const AnnotatedRegion> shown) = 0;
};

struct OracleConfig {
  double correction_noise = 0.0;  // sigma_u, px per box edge
  std::uint64_t seed = 0;
  bool always_satisfied = false;
};

/// Simulated user with access to the ground truth. A frame is unsatisfactory
/// when a ground-truth object has no shown region at IoU >= 0.5, or a shown
/// region carries a label different from the object it overlaps (background
/// for regions overlapping none). Annotation keeps correct regions and
/// replaces the rest by ground-truth boxes, perturbed by sigma_u.
class OracleUser : public UserAgent {
 public:
  OracleUser(const SceneDataset& dataset, OracleConfig config);
  bool satisfied(std::size_t frame, std::span<const AnnotatedRegion> shown) override;
  std::optional<std::vector<AnnotatedRegion>> annotate(
      std::size_t frame, std::span<const AnnotatedRegion> shown) override;

 private:
  const SceneDataset& dataset_;
  OracleConfig config_;
};

/// Replays recorded annotations: a frame is unsatisfactory exactly when the
/// script holds regions for it.
class ScriptedUser : public UserAgent {
 public:
  explicit ScriptedUser(std::map<std::size_t, std::vector<AnnotatedRegion>> script);
  bool satisfied(std::size_t frame, std::span<const AnnotatedRegion> shown) override;
  std::optional<std::vector<AnnotatedRegion>> annotate(
      std::size_t frame, std::span<const AnnotatedRegion> shown) override;

 private:
  std::map<std::size_t, std::vector<AnnotatedRegion>> script_;
};

enum class EventType { kFeedback, kAdvance };
enum class EventStage { kAnnotation, kInference };

/// One user interaction. `edits` is filled in by whoever applied the event.
struct TraceEvent {
  std::size_t seq = 0;
  EventType type = EventType::kAdvance;
  EventStage stage = EventStage::kAnnotation;
  std::size_t frame = 0;
  std::vector<AnnotatedRegion> regions;  // feedback only
  std::size_t edits = 0;
  friend bool operator==(const TraceEvent&, const TraceEvent&) = default;
};

/// Region propagation over frames [first, last) of a detection table.
class AnnotationWindow {
 public:
  /// `initial` is shown on the first frame (empty for a fresh video, model
  /// predictions during feedback). Throws std::invalid_argument on an empty
  /// or out-of-range window.
  AnnotationWindow(std::size_t first, std::size_t last, const DetectionTable& detections,
                   const VosConfig& vos, FrameSize frame_size,
                   std::vector<AnnotatedRegion> initial);

  bool done() const { return current_ >= last_; }
  std::size_t first() const { return first_; }
  std::size_t last() const { return last_; }
  std::size_t current_frame() const { return current_; }
  const std::vector<AnnotatedRegion>& shown() const { return shown_; }

  /// Records the user's regions for the current frame, refreshes the memory
  /// from them and moves on. Returns the number of edits.
  std::size_t submit(std::vector<AnnotatedRegion> regions);
  /// Keeps the shown regions and moves on.
  void accept();

  /// D: one region list per processed frame, in frame order.
  const std::map<std::size_t, std::vector<AnnotatedRegion>>& annotations() const {
    return annotations_;
  }

 private:
  void step();

  std::size_t first_;
  std::size_t last_;
  std::size_t current_;
  const DetectionTable& detections_;
  VosMemory memory_;
  std::vector<AnnotatedRegion> shown_;
  std::map<std::size_t, std::vector<AnnotatedRegion>> annotations_;
};

struct AnnotationResult {
  std::map<std::size_t, std::vector<AnnotatedRegion>> annotations;
  std::vector<TraceEvent> events;
  std::size_t actions = 0;
  std::size_t corrections = 0;  // frames after the first that the user edited
  bool aborted = false;
};

/// The user annotates the first frame of [first, last) and inspects every
/// later one, correcting it when unsatisfied. On abort the annotations made so
/// far are returned with `aborted` set.
AnnotationResult interactive_annotation(std::size_t first, std::size_t last,
                                        const DetectionTable& detections, FrameSize frame_size,
                                        const VosConfig& vos, UserAgent& user,
                                        std::vector<AnnotatedRegion> initial = {});

struct EngagementSummary {
  std::size_t actions = 0;
  std::size_t per_frame_baseline = 0;  // ground-truth objects over the annotated frames
  double ratio = 0.0;
};

/// Sums edits over feedback events; the baseline annotates every ground-truth
/// object on each frame that passed through an annotation window.
EngagementSummary count_user_actions(std::span<const TraceEvent> trace,
                                     const SceneDataset& dataset);

struct HilConfig {
  double t_initial_s = 10.0;
  double t_update_s = 10.0;
  std::size_t max_update = 3;
  double fps = 0.0;  // 0: take the dataset's frame rate
  ImpnArchitecture architecture;
  TrainConfig train;
  DetectorConfig detector;
  DetectorSchedule schedule;
  VosConfig vos;
  bool warm_start = false;
  double test_split = 0.7;  // held-out frames start at this fraction
};

void validate(const HilConfig& config);

struct RoundReport {
  std::size_t round = 0;
  std::size_t frames_annotated = 0;
  double percent_data = 0.0;
  std::size_t user_actions = 0;
  MetricsReport whole;
  MetricsReport test;
  friend bool operator==(const RoundReport&, const RoundReport&) = default;
};

/// Wall-clock time is kept apart so reports of identical runs are identical.
struct SessionReport {
  std::string method;  // "hil" or "cml"
  std::size_t frame_count = 0;
  std::vector<RoundReport> rounds;
  friend bool operator==(const SessionReport&, const SessionReport&) = default;
};

std::string report_to_string(const SessionReport& report);
SessionReport report_from_string(const std::string& text);
void save_report(const SessionReport& report, const std::filesystem::path& path);
SessionReport load_report(const std::filesystem::path& path);

std::string trace_to_string(std::span<const TraceEvent> trace);
std::vector<TraceEvent> trace_from_string(const std::string& text);
void save_trace(std::span<const TraceEvent> trace, const std::filesystem::path& path);
std::vector<TraceEvent> load_trace(const std::filesystem::path& path);

/// `background` followed by the dataset's labels.
std::vector<std::string> session_labels(const SceneDataset& dataset);

/// Node targets from region annotations: each detection takes the label of
/// the region it overlaps best at IoU >= 0.5, background otherwise.
LabeledGraph label_detections(std::span<const DetectionRecord> detections,
                              std::span<const AnnotatedRegion> regions, FrameSize frame_size,
                              std::span<const std::string> class_labels);

std::vector<FramePrediction> predict_frames(const ImpnModel& model, const DetectionTable& detections,
                                            FrameSize frame_size, std::size_t first,
                                            std::size_t last);

/// Everything a retraining needs, copied so it can run on another thread.
struct TrainingJob {
  std::size_t round = 0;
  std::vector<LabeledGraph> data;
  ImpnArchitecture architecture;
  TrainConfig train;
  std::optional<ImpnModel> initial;
  std::shared_ptr<const SceneDataset> dataset;
  std::shared_ptr<const DetectionTable> detections;
  std::size_t test_start = 0;
};

struct TrainingResult {
  std::size_t round = 0;
  ImpnModel model;
  MetricsReport whole;
  MetricsReport test;
  double seconds = 0.0;
};

/// Fits the model and scores it on the whole video and the held-out tail.
TrainingResult run_training(const TrainingJob& job);

struct StepResult {
  bool accepted = false;
  bool retrain_scheduled = false;
  std::size_t frame_index = 0;
};

/// The interaction loop as an explicit state machine, driven by feedback()
/// and advance(). When a window completes, a training job becomes pending;
/// the owner runs it (inline or on a worker) and hands the result back through
/// finish_training() before the next mutation. Not thread-safe.
class HilSession {
 public:
  enum class Stage { kAnnotation, kTraining, kInference, kDone };

  /// Throws std::invalid_argument when the dataset is not longer than the
  /// initial window or the config is invalid.
  HilSession(std::shared_ptr<const SceneDataset> dataset, HilConfig config,
             std::uint64_t model_seed);

  Stage stage() const { return stage_; }
  bool done() const { return stage_ == Stage::kDone; }
  std::size_t frame_index() const;
  std::size_t updates_used() const { return update_time_; }
  std::size_t updates_remaining() const { return config_.max_update - update_time_; }
  bool at_window_start() const;

  /// What the user currently sees: the window proposal during annotation,
  /// model predictions during inference, nothing otherwise.
  std::vector<AnnotatedRegion> shown() const;
  /// Predictions of the current model on any frame, with the current
  /// detector. Throws std::logic_error before the first model exists.
  PredictionSet predictions(std::size_t frame) const;

  /// Feedback for the current frame. During annotation it replaces the
  /// proposal; during inference it opens a feedback window when updates
  /// remain, and is rejected otherwise. Throws std::invalid_argument when the
  /// frame is not the current one or a region is malformed, std::logic_error
  /// while training is pending.
  StepResult feedback(std::size_t frame, std::vector<AnnotatedRegion> regions);
  /// Accepts what is shown and moves to the next frame.
  StepResult advance();

  bool training_pending() const { return stage_ == Stage::kTraining && job_.has_value(); }
  TrainingJob take_training_job();
  void finish_training(TrainingResult result);

  std::shared_ptr<const ImpnModel> model() const { return model_; }
  std::size_t model_round() const { return rounds_.empty() ? 0 : rounds_.size() - 1; }
  const SessionReport& report() const { return report_; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  const std::vector<double>& training_seconds() const { return seconds_; }
  const std::map<std::size_t, std::vector<AnnotatedRegion>>& annotations() const {
    return annotations_;
  }
  const std::vector<std::string>& class_labels() const { return labels_; }
  const SceneDataset& dataset() const { return *dataset_; }
  const DetectionTable& detections() const { return *detections_; }
  /// Replaced, never modified, when the detector moves to a new round.
  std::shared_ptr<const DetectionTable> detection_table() const { return detections_; }
  const HilConfig& config() const { return config_; }

 private:
  void open_window(std::size_t first, std::vector<AnnotatedRegion> initial);
  void close_window();
  void check_regions(std::size_t frame, const std::vector<AnnotatedRegion>& regions) const;
  void record(EventType type, EventStage stage, std::size_t frame,
              std::vector<AnnotatedRegion> regions, std::size_t edits);

  std::shared_ptr<const SceneDataset> dataset_;
  HilConfig config_;
  std::uint64_t model_seed_;
  std::vector<std::string> labels_;
  std::size_t initial_frames_;
  std::size_t update_frames_;
  std::size_t test_start_;

  Stage stage_ = Stage::kAnnotation;
  std::size_t frame_index_ = 0;
  std::size_t resume_index_ = 0;
  std::size_t update_time_ = 0;
  std::size_t actions_ = 0;
  std::shared_ptr<const DetectionTable> detections_;
  std::optional<AnnotationWindow> window_;
  std::map<std::size_t, std::vector<AnnotatedRegion>> annotations_;
  std::optional<TrainingJob> job_;
  std::shared_ptr<const ImpnModel> model_;
  std::vector<std::size_t> rounds_;
  SessionReport report_;
  std::vector<TraceEvent> trace_;
  std::vector<double> seconds_;
};

struct HilOutcome {
  SessionReport report;
  std::vector<TraceEvent> trace;
  std::vector<double> training_seconds;
  bool aborted = false;
};

/// Drives a session with `user` until the video ends: annotate the first
/// frame of every window, correct unsatisfactory frames inside windows, and
/// give feedback during inference on the first unsatisfactory frame while
/// updates remain.
HilOutcome run_hil_session(std::shared_ptr<const SceneDataset> dataset, const HilConfig& config,
                           UserAgent& user, std::uint64_t model_seed);

/// Applies recorded events to a fresh session, training inline. Throws
/// std::invalid_argument when an event does not fit the session state.
HilOutcome replay_trace(std::shared_ptr<const SceneDataset> dataset, const HilConfig& config,
                        std::span<const TraceEvent> trace, std::uint64_t model_seed);

/// Trains once on ground-truth labels of the first `split` fraction of frames
/// with the detector at the schedule's final round, and reports one round.
/// Throws std::invalid_argument unless 0 < split < 1 leaves at least one frame
/// on each side, or when the dataset has fewer than 10 frames.
SessionReport run_cml_baseline(const SceneDataset& dataset, const HilConfig& config,
                               double split, std::uint64_t model_seed);

}  // namespace gazeloop
