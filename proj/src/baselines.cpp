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

#include "gazeloop/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gazeloop/errors.hpp"
#include "gazeloop/rng.hpp"

namespace gazeloop {

namespace {

NodePrediction make_prediction(FeatureVector logits, const std::vector<std::string>& labels,
                               const FrameGraph& graph, std::size_t v) {
  NodePrediction p;
  p.probabilities = softmax(logits);
  p.logits = std::move(logits);
  p.class_index = static_cast<std::size_t>(
      std::max_element(p.probabilities.begin(), p.probabilities.end()) - p.probabilities.begin());
  p.label = labels[p.class_index];
  p.score = p.probabilities[p.class_index];
  p.box = graph.nodes()[v].box;
  p.source_index = graph.source_index(v);
  return p;
}

}  // namespace

GcnModel make_gcn_model(const DenseMatrix& adjacency, std::vector<DenseMatrix> weights,
                        DenseMatrix head_weight, std::vector<std::string> class_labels) {
  const std::size_t n = adjacency.rows();
  if (adjacency.cols() != n) throw std::invalid_argument("adjacency must be square");
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency(i, i) != 0.0) throw std::invalid_argument("adjacency must have no self-loops");
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adjacency(i, j);
      if ((a != 0.0 && a != 1.0) || a != adjacency(j, i)) {
        throw std::invalid_argument("adjacency must be a symmetric 0/1 matrix");
      }
    }
  }
  if (class_labels.empty() || head_weight.cols() != class_labels.size()) {
    throw std::invalid_argument("head width must equal the class count");
  }
  for (std::size_t l = 1; l < weights.size(); ++l) {
    if (weights[l].rows() != weights[l - 1].cols()) {
      throw std::invalid_argument("gcn weights do not chain");
    }
  }
  if (!weights.empty() && head_weight.rows() != weights.back().cols()) {
    throw std::invalid_argument("gcn head does not match the last layer");
  }

  GcnModel model;
  model.node_count = n;
  model.adjacency = adjacency;
  for (std::size_t i = 0; i < n; ++i) model.adjacency(i, i) = 1.0;
  std::vector<double> inv_sqrt_degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t j = 0; j < n; ++j) degree += model.adjacency(i, j);
    inv_sqrt_degree[i] = 1.0 / std::sqrt(degree);
  }
  model.propagation = DenseMatrix(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      model.propagation(i, j) = inv_sqrt_degree[i] * model.adjacency(i, j) * inv_sqrt_degree[j];
  model.weights = std::move(weights);
  model.head_weight = std::move(head_weight);
  model.class_labels = std::move(class_labels);
  return model;
}

GcnModel make_gcn_model(const FrameGraph& graph, std::size_t hidden_dim, std::size_t depth,
                        std::vector<std::string> class_labels, std::uint64_t seed) {
  const std::size_t n = graph.node_count();
  DenseMatrix adjacency(n, n);
  for (const auto& [u, v] : graph.edges()) adjacency(u, v) = 1.0;
  auto rng = make_rng(seed, {0x6c17ULL});
  auto glorot = [&](std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    std::uniform_real_distribution<double> dist(-std::sqrt(6.0 / (rows + cols)),
                                                std::sqrt(6.0 / (rows + cols)));
    for (double& v : m.values()) v = dist(rng);
    return m;
  };
  std::vector<DenseMatrix> weights;
  std::size_t width = graph.feature_dim();
  for (std::size_t l = 0; l < depth; ++l) {
    weights.push_back(glorot(width, hidden_dim));
    width = hidden_dim;
  }
  DenseMatrix head = glorot(width, class_labels.size());
  return make_gcn_model(adjacency, std::move(weights), std::move(head), std::move(class_labels));
}

DenseMatrix gcn_propagate(const FrameGraph& graph, const GcnModel& model) {
  const std::size_t n = graph.node_count();
  if (n != model.node_count) {
    throw UnseenNodeUnsupported("transductive model was built for " +
                                std::to_string(model.node_count) + " nodes, graph has " +
                                std::to_string(n));
  }
  DenseMatrix h = graph.features();
  for (const auto& w : model.weights) {
    if (w.rows() != h.cols()) throw std::invalid_argument("gcn input width mismatch");
    DenseMatrix mixed(n, h.cols());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const double a = model.propagation(i, j);
        if (a == 0.0) continue;
        for (std::size_t c = 0; c < h.cols(); ++c) mixed(i, c) += a * h(j, c);
      }
    DenseMatrix next(n, w.cols());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < h.cols(); ++c) {
        const double x = mixed(i, c);
        if (x == 0.0) continue;
        for (std::size_t o = 0; o < w.cols(); ++o) next(i, o) += x * w(c, o);
      }
    for (double& v : next.values()) v = std::max(v, 0.0);
    h = std::move(next);
  }
  return h;
}

PredictionSet gcn_forward(const FrameGraph& graph, const GcnModel& model) {
  const DenseMatrix h = gcn_propagate(graph, model);
  PredictionSet out;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    FeatureVector logits(model.class_labels.size(), 0.0);
    for (std::size_t c = 0; c < h.cols(); ++c)
      for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += h(v, c) * model.head_weight(c, k);
    out.nodes.push_back(make_prediction(std::move(logits), model.class_labels, graph, v));
  }
  return out;
}

LocalModel local_baseline_fit(std::span<const LabeledGraph> dataset,
                              std::vector<std::string> class_labels, const TrainConfig& config) {
  validate(config);
  if (dataset.empty()) throw std::invalid_argument("training set is empty");
  if (class_labels.empty()) throw std::invalid_argument("local baseline needs classes");
  std::size_t dim = 0;
  std::size_t total_nodes = 0;
  for (const auto& g : dataset) {
    if (g.graph.node_count() == 0) continue;
    if (g.graph.feature_dim() <= kCoordinateFeatures) {
      throw std::invalid_argument("node features carry no descriptor");
    }
    const std::size_t d = g.graph.feature_dim() - kCoordinateFeatures;
    if (dim != 0 && d != dim) throw std::invalid_argument("descriptor widths differ");
    dim = d;
    if (g.targets.size() != g.graph.node_count()) {
      throw std::invalid_argument("every node needs a label");
    }
    for (auto t : g.targets)
      if (t >= class_labels.size()) throw std::invalid_argument("node label out of range");
    total_nodes += g.graph.node_count();
  }
  if (total_nodes == 0) throw std::invalid_argument("training set has no nodes");

  const std::size_t C = class_labels.size();
  LocalModel model{DenseMatrix(C, dim), DenseMatrix(C, 1), std::move(class_labels)};
  auto rng = make_rng(config.seed, {0x10ca1ULL});
  std::uniform_real_distribution<double> init(-0.01, 0.01);
  for (double& v : model.weight.values()) v = init(rng);

  DenseMatrix gw(C, dim), gb(C, 1);
  std::vector<DenseMatrix*> params{&model.weight, &model.bias};
  std::vector<const DenseMatrix*> grads{&gw, &gb};
  auto state = AdamState::for_parameters(std::vector<const DenseMatrix*>{&model.weight, &model.bias},
                                         {config.learning_rate});
  FeatureVector delta(C);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    gw.fill(0.0);
    gb.fill(0.0);
    for (const auto& g : dataset) {
      for (std::size_t v = 0; v < g.graph.node_count(); ++v) {
        const auto x = g.graph.feature(v).subspan(kCoordinateFeatures);
        auto logits = model.weight.multiply(x);
        for (std::size_t k = 0; k < C; ++k) logits[k] += model.bias(k, 0);
        const auto probs = softmax(logits);
        for (std::size_t k = 0; k < C; ++k) {
          delta[k] = probs[k] - (k == g.targets[v] ? 1.0 : 0.0);
          gb(k, 0) += delta[k];
        }
        gw.add_outer(1.0, delta, x);
      }
    }
    adam_step(params, grads, state);
  }
  return model;
}

PredictionSet local_baseline_predict(const FrameGraph& graph, const LocalModel& model) {
  PredictionSet out;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    const auto x = graph.feature(v).subspan(kCoordinateFeatures);
    if (x.size() != model.weight.cols()) {
      throw std::invalid_argument("descriptor width does not match the local model");
    }
    auto logits = model.weight.multiply(x);
    for (std::size_t k = 0; k < logits.size(); ++k) logits[k] += model.bias(k, 0);
    out.nodes.push_back(make_prediction(std::move(logits), model.class_labels, graph, v));
  }
  return out;
}

}  // namespace gazeloop
