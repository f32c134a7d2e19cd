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

// Inductive message-passing network. Each of the K layers computes, for every
// node v,
//
//   h_N(v) = AGG({h_u : u in N(v)})
//   h_v'   = ReLU(W [h_v ; h_N(v)] + b)
//
// and a linear head followed by softmax scores the final embeddings. Weights
// are shared across nodes, so any graph with the right feature width can be
// scored without retraining.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gazeloop/graph.hpp"
#include "gazeloop/lstm.hpp"
#include "gazeloop/numerics.hpp"

namespace gazeloop {

enum class AggregatorKind { kMaxPool, kLstm };

const char* aggregator_name(AggregatorKind kind);
AggregatorKind aggregator_from_name(const std::string& name);

/// Elementwise max; an empty neighbourhood gives the zero vector of `dim`.
/// Throws std::invalid_argument on mixed dimensions.
FeatureVector aggregate_maxpool(std::span<const FeatureVector> neighbors, std::size_t dim);

/// Final hidden state of one LSTM pass over `neighbors` in the given order.
/// Zero vector for an empty sequence.
FeatureVector aggregate_lstm(std::span<const FeatureVector> neighbors, const LstmParams& params);

struct ImpnLayer {
  DenseMatrix weight;  // d_out x 2*d_in, acting on [h_v ; h_N(v)]
  DenseMatrix bias;    // d_out x 1
  std::optional<LstmParams> lstm;  // aggregator state for kLstm; hidden dim = d_in

  std::size_t input_dim() const { return weight.cols() / 2; }
  std::size_t output_dim() const { return weight.rows(); }
  friend bool operator==(const ImpnLayer&, const ImpnLayer&) = default;
};

struct ImpnArchitecture {
  std::size_t input_dim = 0;
  std::size_t hidden_dim = 32;
  std::size_t depth = 2;
  AggregatorKind aggregator = AggregatorKind::kMaxPool;
  std::vector<std::string> class_labels;
};

struct ImpnModel {
  AggregatorKind aggregator = AggregatorKind::kMaxPool;
  std::vector<std::string> class_labels;
  std::vector<ImpnLayer> layers;
  DenseMatrix head_weight;  // C x d_K
  DenseMatrix head_bias;    // C x 1

  std::size_t depth() const { return layers.size(); }
  std::size_t input_dim() const;
  std::size_t class_count() const { return class_labels.size(); }
  std::optional<std::size_t> class_index(const std::string& label) const;

  /// Every trainable matrix in a fixed order (layer weight, bias, LSTM
  /// matrices, ..., head weight, head bias).
  std::vector<DenseMatrix*> parameters();
  std::vector<const DenseMatrix*> parameters() const;
  std::size_t parameter_count() const;
  /// Same structure, all parameters zero. Used as a gradient accumulator.
  ImpnModel zeros_like() const;

  /// Throws std::invalid_argument when layer dimensions do not chain, the
  /// head does not match, there are no classes, or a weight is not finite.
  void check() const;

  friend bool operator==(const ImpnModel&, const ImpnModel&) = default;
};

/// Glorot-uniform weights, zero biases.
ImpnModel init_model(const ImpnArchitecture& arch, std::uint64_t seed);

struct NodePrediction {
  std::size_t class_index = 0;
  std::string label;
  FeatureVector logits;
  FeatureVector probabilities;
  double score = 0.0;  // probability of the predicted class
  BoundingBox box;
  std::size_t source_index = 0;
};

/// Per-node outputs in the graph's canonical node order.
struct PredictionSet {
  std::vector<NodePrediction> nodes;
};

/// Intermediate activations of one forward pass.
struct ForwardCache {
  std::vector<DenseMatrix> hidden;          // hidden[0] = X, hidden[k] = h^(k)
  std::vector<DenseMatrix> pre_activation;  // W [h ; agg] + b per layer
  std::vector<DenseMatrix> aggregated;      // h_N(v) per layer
  /// Max-pool winners: argmax[k][v * d_in + j] is the neighbour supplying
  /// component j, or npos for an empty neighbourhood.
  std::vector<std::vector<std::size_t>> argmax;
  std::vector<std::vector<LstmTrace>> lstm;  // per layer, per node
  DenseMatrix probabilities;                 // n x C
};

/// Throws std::invalid_argument when the graph feature width differs from the
/// model input width. An empty graph gives an empty prediction set.
PredictionSet forward(const FrameGraph& graph, const ImpnModel& model,
                      ForwardCache* cache = nullptr);

/// Scores a graph whose nodes were never seen in training. Same computation
/// as forward(): no retraining and no assumption about node count.
PredictionSet predict_unseen(const ImpnModel& model, const FrameGraph& graph);

/// A frame graph with one target class index per canonical node.
struct LabeledGraph {
  FrameGraph graph;
  std::vector<std::size_t> targets;
};

/// Maps string labels given in detection input order onto canonical node
/// order. Throws std::invalid_argument on a missing or unknown label.
LabeledGraph make_labeled_graph(std::span<const DetectionRecord> detections, FrameSize frame_size,
                                std::span<const std::string> labels,
                                std::span<const std::string> class_labels);

/// Summed cross-entropy over nodes; gradients are added into `grad`, which
/// must come from model.zeros_like().
double accumulate_loss_and_gradient(const FrameGraph& graph, const ImpnModel& model,
                                    std::span<const std::size_t> targets, ImpnModel& grad);

struct LossAndGradient {
  double loss = 0.0;
  ImpnModel gradient;
};

/// Throws std::invalid_argument if targets.size() != node count or a target is
/// out of range.
LossAndGradient loss_and_backward(const FrameGraph& graph, const ImpnModel& model,
                                  std::span<const std::size_t> targets);

/// Loss only, same definition as loss_and_backward.
double graph_loss(const FrameGraph& graph, const ImpnModel& model,
                  std::span<const std::size_t> targets);

struct TrainConfig {
  std::size_t epochs = 200;
  double learning_rate = 1e-2;
  std::uint64_t seed = 0;
  /// Stop once the epoch loss has failed to improve on the best seen by more
  /// than this for `patience` consecutive epochs. 0 disables.
  double early_stop_tolerance = 0.0;
  std::size_t patience = 10;
  /// Graphs per Adam step; 0 means the whole dataset.
  std::size_t batch_size = 0;
};

void validate(const TrainConfig& config);

struct FitResult {
  ImpnModel model;
  /// Per epoch: summed loss divided by node count, at the start of the epoch's
  /// updates for full-batch training, accumulated over batches otherwise.
  std::vector<double> epoch_losses;
};

/// Adam training from a fresh initialisation seeded by config.seed.
FitResult fit(std::span<const LabeledGraph> dataset, const ImpnArchitecture& arch,
              const TrainConfig& config);

/// Adam training starting from `initial`.
FitResult fit_from(std::span<const LabeledGraph> dataset, ImpnModel initial,
                   const TrainConfig& config);

}  // namespace gazeloop
