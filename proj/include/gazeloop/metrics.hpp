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

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeloop/geometry.hpp"
#include "gazeloop/impn.hpp"
#include "gazeloop/scene.hpp"

namespace gazeloop {

struct ScoredBox {
  std::size_t frame = 0;
  BoundingBox box;
  std::string label;
  double score = 0.0;
};

struct TruthBox {
  std::size_t frame = 0;
  BoundingBox box;
  std::string label;
};

/// {0.50, 0.55, ..., 0.95}
std::vector<double> coco_thresholds();

/// All-point interpolated area under the precision-recall curve for `label`.
/// Predictions are taken in descending score order (input order breaks ties);
/// each is matched to the unmatched same-frame truth box of that class with the
/// highest IoU, provided it is at least `alpha`.
/// nullopt when the class has neither truth nor predictions; 0 when it has
/// predictions but no truth. Throws std::invalid_argument unless 0 < alpha <= 1.
std::optional<double> average_precision(std::span<const ScoredBox> predictions,
                                        std::span<const TruthBox> truth,
                                        const std::string& label, double alpha);

/// Mean AP over classes (background excluded, undefined classes skipped), one
/// value per threshold. Throws UndefinedResult when `truth` has no
/// foreground boxes.
std::vector<double> mean_ap(std::span<const ScoredBox> predictions,
                            std::span<const TruthBox> truth, std::span<const double> alphas);

/// Mean recall over the classes present in `truth`. When `classes` is not
/// empty, only positions whose true label is listed are scored. Throws
/// std::invalid_argument on empty or mismatched input, or when no position
/// qualifies.
double balanced_accuracy(std::span<const std::string> predicted,
                         std::span<const std::string> truth,
                         std::span<const std::string> classes = {});

/// Label of the smallest predicted non-background box containing the point;
/// background when none does.
std::string fixation_to_aoi(const FixationPoint& fixation, const PredictionSet& predictions);

struct MetricsReport {
  /// Per class, AP at each threshold of coco_thresholds(); nullopt if undefined.
  std::map<std::string, std::vector<std::optional<double>>> per_class_ap;
  double map50 = 0.0;
  double map75 = 0.0;
  double map = 0.0;
  double balanced_accuracy = 0.0;
  std::optional<double> fixation_accuracy;
  std::size_t frames = 0;
  friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Per-frame predictions together with the detections they were made on.
struct FramePrediction {
  std::size_t frame = 0;
  PredictionSet predictions;
};

/// Pools all frames listed in `predictions`. Detection metrics treat
/// every node not predicted as background as a scored box. Balanced accuracy
/// compares each node's label with the ground-truth object it overlaps at
/// IoU >= 0.5 (background otherwise). Fixation accuracy is reported when the
/// dataset has fixations. Throws UndefinedResult when those frames hold no
/// ground truth.
MetricsReport evaluate(const SceneDataset& dataset, std::span<const FramePrediction> predictions);

}  // namespace gazeloop
