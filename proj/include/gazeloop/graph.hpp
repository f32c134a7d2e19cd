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

#include <span>
#include <utility>
#include <vector>

#include "gazeloop/numerics.hpp"
#include "gazeloop/proposals.hpp"

namespace gazeloop {

/// Normalized box coordinates followed by the descriptor.
FeatureVector node_feature(const DetectionRecord& det, double frame_width, double frame_height);

inline constexpr std::size_t kCoordinateFeatures = 4;

/// Complete directed graph (no self-loops) over one frame's detections. Nodes
/// are kept in canonical order: by box corners, then descriptor
/// lexicographically, so construction does not depend on input order.
class FrameGraph {
 public:
  FrameGraph() = default;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return nodes_.size() * (nodes_.size() ? nodes_.size() - 1 : 0); }
  std::size_t feature_dim() const { return features_.cols(); }

  const DenseMatrix& features() const { return features_; }
  std::span<const double> feature(std::size_t v) const { return features_.row(v); }
  const std::vector<DetectionRecord>& nodes() const { return nodes_; }
  /// Position of canonical node v in the list passed to build_frame_graph.
  std::size_t source_index(std::size_t v) const { return source_index_[v]; }
  FrameSize frame_size() const { return frame_size_; }

  /// N(v): every other node, ascending canonical order.
  std::vector<std::size_t> neighbors(std::size_t v) const;
  std::vector<std::pair<std::size_t, std::size_t>> edges() const;

  friend FrameGraph build_frame_graph(std::span<const DetectionRecord> detections,
                                      FrameSize frame_size);

 private:
  std::vector<DetectionRecord> nodes_;
  std::vector<std::size_t> source_index_;
  DenseMatrix features_;
  FrameSize frame_size_;
};

/// Throws std::invalid_argument on zero frame dimensions or mixed descriptor
/// lengths. An empty detection list gives an empty graph.
FrameGraph build_frame_graph(std::span<const DetectionRecord> detections, FrameSize frame_size);

}  // namespace gazeloop
