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

#include "gazeloop/graph.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace gazeloop {

FeatureVector node_feature(const DetectionRecord& det, double frame_width, double frame_height) {
  if (!(frame_width > 0.0) || !(frame_height > 0.0)) {
    throw std::invalid_argument("frame dimensions must be positive");
  }
  require_valid(det.box, "detection box");
  FeatureVector out;
  out.reserve(kCoordinateFeatures + det.descriptor.size());
  out.push_back(std::clamp(det.box.x_min / frame_width, 0.0, 1.0));
  out.push_back(std::clamp(det.box.y_min / frame_height, 0.0, 1.0));
  out.push_back(std::clamp(det.box.x_max / frame_width, 0.0, 1.0));
  out.push_back(std::clamp(det.box.y_max / frame_height, 0.0, 1.0));
  out.insert(out.end(), det.descriptor.begin(), det.descriptor.end());
  return out;
}

std::vector<std::size_t> FrameGraph::neighbors(std::size_t v) const {
  std::vector<std::size_t> out;
  out.reserve(node_count() ? node_count() - 1 : 0);
  for (std::size_t u = 0; u < node_count(); ++u)
    if (u != v) out.push_back(u);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> FrameGraph::edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  out.reserve(edge_count());
  for (std::size_t u = 0; u < node_count(); ++u)
    for (std::size_t v = 0; v < node_count(); ++v)
      if (u != v) out.emplace_back(u, v);
  return out;
}

FrameGraph build_frame_graph(std::span<const DetectionRecord> detections, FrameSize frame_size) {
  if (!(frame_size.width > 0.0) || !(frame_size.height > 0.0)) {
    throw std::invalid_argument("frame dimensions must be positive");
  }
  FrameGraph graph;
  graph.frame_size_ = frame_size;
  if (detections.empty()) return graph;

  const std::size_t dim = detections.front().descriptor.size();
  for (const auto& d : detections) {
    if (d.descriptor.size() != dim) {
      throw std::invalid_argument("detections in one frame must share descriptor length");
    }
  }

  std::vector<std::size_t> order(detections.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ba = detections[a].box;
    const auto& bb = detections[b].box;
    if (ba.x_min != bb.x_min) return ba.x_min < bb.x_min;
    if (ba.y_min != bb.y_min) return ba.y_min < bb.y_min;
    if (ba.x_max != bb.x_max) return ba.x_max < bb.x_max;
    if (ba.y_max != bb.y_max) return ba.y_max < bb.y_max;
    return std::lexicographical_compare(detections[a].descriptor.begin(),
                                        detections[a].descriptor.end(),
                                        detections[b].descriptor.begin(),
                                        detections[b].descriptor.end());
  });

  const std::size_t d_node = kCoordinateFeatures + dim;
  graph.features_ = DenseMatrix(detections.size(), d_node);
  for (std::size_t v = 0; v < order.size(); ++v) {
    const auto& det = detections[order[v]];
    const auto feat = node_feature(det, frame_size.width, frame_size.height);
    std::copy(feat.begin(), feat.end(), graph.features_.row(v).begin());
    graph.nodes_.push_back(det);
    graph.source_index_.push_back(order[v]);
  }
  return graph;
}

}  // namespace gazeloop
