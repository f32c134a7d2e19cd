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

#include "gazeloop/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <stdexcept>

#include "gazeloop/errors.hpp"

namespace gazeloop {

std::vector<double> coco_thresholds() {
  std::vector<double> out;
  for (int i = 0; i < 10; ++i) out.push_back(0.50 + 0.05 * i);
  return out;
}

std::optional<double> average_precision(std::span<const ScoredBox> predictions,
                                        std::span<const TruthBox> truth,
                                        const std::string& label, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must lie in (0, 1]");

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].label == label) order.push_back(i);
  }
  std::vector<std::size_t> gt;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    if (truth[j].label == label) gt.push_back(j);
  }
  if (gt.empty()) {
    if (order.empty()) return std::nullopt;
    return 0.0;
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return predictions[a].score > predictions[b].score;
  });

  std::vector<bool> claimed(truth.size(), false);
  std::vector<double> precision, recall;
  std::size_t tp = 0;
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    const auto& p = predictions[order[rank]];
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    for (std::size_t j : gt) {
      if (claimed[j] || truth[j].frame != p.frame) continue;
      const double o = iou(p.box, truth[j].box);
      if (o >= alpha && o > best_iou) {
        best_iou = o;
        best = j;
      }
    }
    if (best) {
      claimed[*best] = true;
      ++tp;
    }
    precision.push_back(static_cast<double>(tp) / static_cast<double>(rank + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(gt.size()));
  }

  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

std::vector<double> mean_ap(std::span<const ScoredBox> predictions,
                            std::span<const TruthBox> truth, std::span<const double> alphas) {
  std::set<std::string> classes;
  bool any_truth = false;
  for (const auto& t : truth) {
    if (t.label == kBackground) continue;
    classes.insert(t.label);
    any_truth = true;
  }
  if (!any_truth) throw UndefinedResult("mean AP is undefined without ground truth");
  for (const auto& p : predictions) {
    if (p.label != kBackground) classes.insert(p.label);
  }
  std::vector<double> out;
  for (double alpha : alphas) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& c : classes) {
      if (auto ap = average_precision(predictions, truth, c, alpha)) {
        sum += *ap;
        ++count;
      }
    }
    out.push_back(sum / static_cast<double>(count));
  }
  return out;
}

double balanced_accuracy(std::span<const std::string> predicted,
                         std::span<const std::string> truth,
                         std::span<const std::string> classes) {
  if (predicted.size() != truth.size()) {
    throw std::invalid_argument("prediction and truth lengths differ");
  }
  if (truth.empty()) throw std::invalid_argument("balanced accuracy of an empty set");
  std::map<std::string, std::pair<std::size_t, std::size_t>> tally;  // hits, total
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (!classes.empty() && std::find(classes.begin(), classes.end(), truth[i]) == classes.end()) {
      continue;
    }
    auto& [hits, total] = tally[truth[i]];
    ++total;
    if (predicted[i] == truth[i]) ++hits;
  }
  if (tally.empty()) throw std::invalid_argument("no position carries a scored class");
  double sum = 0.0;
  for (const auto& [label, t] : tally) {
    sum += static_cast<double>(t.first) / static_cast<double>(t.second);
  }
  return sum / static_cast<double>(tally.size());
}

std::string fixation_to_aoi(const FixationPoint& fixation, const PredictionSet& predictions) {
  std::vector<LabeledBox> boxes;
  for (const auto& node : predictions.nodes) {
    if (node.label != kBackground) boxes.push_back({node.box, node.label});
  }
  const auto hit = smallest_containing(boxes, fixation.x, fixation.y);
  return hit ? boxes[*hit].label : std::string(kBackground);
}

MetricsReport evaluate(const SceneDataset& dataset, std::span<const FramePrediction> predictions) {
  std::vector<ScoredBox> scored;
  std::vector<TruthBox> truth;
  std::vector<std::string> node_pred, node_truth;
  std::size_t fixation_hits = 0, fixation_total = 0;

  for (const auto& fp : predictions) {
    if (fp.frame >= dataset.frames.size()) throw std::invalid_argument("prediction frame out of range");
    const Frame& frame = dataset.frames[fp.frame];
    for (const auto& obj : frame.objects) truth.push_back({fp.frame, obj.box, obj.class_label});

    std::vector<DetectionRecord> as_detections;
    for (const auto& node : fp.predictions.nodes) {
      if (node.label != kBackground) scored.push_back({fp.frame, node.box, node.label, node.score});
      as_detections.push_back({fp.frame, node.box, {}, std::nullopt});
    }
    const auto matched = match_to_ground_truth(as_detections, frame.objects);
    for (std::size_t i = 0; i < fp.predictions.nodes.size(); ++i) {
      node_pred.push_back(fp.predictions.nodes[i].label);
      node_truth.push_back(matched[i] ? frame.objects[*matched[i]].class_label
                                      : std::string(kBackground));
    }
    if (fp.frame < dataset.fixations.size()) {
      const auto& fix = dataset.fixations[fp.frame];
      ++fixation_total;
      if (fixation_to_aoi(fix, fp.predictions) == fix.aoi_label) ++fixation_hits;
    }
  }

  MetricsReport report;
  report.frames = predictions.size();
  const auto alphas = coco_thresholds();
  const auto maps = mean_ap(scored, truth, alphas);
  report.map = std::accumulate(maps.begin(), maps.end(), 0.0) / static_cast<double>(maps.size());
  report.map50 = maps[0];
  report.map75 = maps[5];

  std::set<std::string> classes;
  for (const auto& t : truth) classes.insert(t.label);
  for (const auto& s : scored) classes.insert(s.label);
  for (const auto& c : classes) {
    auto& row = report.per_class_ap[c];
    for (double alpha : alphas) row.push_back(average_precision(scored, truth, c, alpha));
  }
  if (!node_truth.empty()) report.balanced_accuracy = balanced_accuracy(node_pred, node_truth);
  if (fixation_total > 0) {
    report.fixation_accuracy =
        static_cast<double>(fixation_hits) / static_cast<double>(fixation_total);
  }
  return report;
}

}  // namespace gazeloop
