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
#include <span>
#include <string>
#include <vector>

#include "gazeloop/graph.hpp"
#include "gazeloop/impn.hpp"

namespace gazeloop {

/// Transductive graph convolution over a fixed graph:
///   H^(l+1) = ReLU(D^-1/2 (A + I) D^-1/2 H^(l) W^(l)),
/// followed by a linear softmax head. The propagation matrix is tied to the
/// node count it was built for.
struct GcnModel {
  std::size_t node_count = 0;
  DenseMatrix adjacency;   // A + I, symmetric, unit diagonal
  DenseMatrix propagation; // D^-1/2 (A + I) D^-1/2
  std::vector<DenseMatrix> weights;  // d_l x d_(l+1)
  DenseMatrix head_weight;           // d_K x C
  std::vector<std::string> class_labels;
};

/// Builds the propagation matrix from an adjacency without self-loops.
/// Throws std::invalid_argument unless it is square, symmetric, and 0/1 with
/// a zero diagonal, or when weights do not chain.
GcnModel make_gcn_model(const DenseMatrix& adjacency, std::vector<DenseMatrix> weights,
                        DenseMatrix head_weight, std::vector<std::string> class_labels);

/// Complete-graph adjacency for `graph` and Glorot-initialised weights.
GcnModel make_gcn_model(const FrameGraph& graph, std::size_t hidden_dim, std::size_t depth,
                        std::vector<std::string> class_labels, std::uint64_t seed);

/// Hidden representation after all propagation layers. Throws
/// UnseenNodeUnsupported when the graph's node count differs from the model's.
DenseMatrix gcn_propagate(const FrameGraph& graph, const GcnModel& model);

PredictionSet gcn_forward(const FrameGraph& graph, const GcnModel& model);

/// Per-node multinomial logistic regression on the descriptor part of the node
/// features. Box coordinates and neighbours are ignored.
struct LocalModel {
  DenseMatrix weight;  // C x d_app
  DenseMatrix bias;    // C x 1
  std::vector<std::string> class_labels;
};

LocalModel local_baseline_fit(std::span<const LabeledGraph> dataset,
                              std::vector<std::string> class_labels, const TrainConfig& config);

PredictionSet local_baseline_predict(const FrameGraph& graph, const LocalModel& model);

}  // namespace gazeloop
