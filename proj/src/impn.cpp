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

#include "gazeloop/impn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "gazeloop/rng.hpp"

namespace gazeloop {

namespace {

constexpr std::size_t kNoNeighbor = std::numeric_limits<std::size_t>::max();

void glorot(DenseMatrix& m, Rng& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : m.values()) v = dist(rng);
}

std::vector<std::span<const double>> neighbor_rows(const DenseMatrix& h, std::size_t v) {
  std::vector<std::span<const double>> rows;
  rows.reserve(h.rows());
  for (std::size_t u = 0; u < h.rows(); ++u)
    if (u != v) rows.push_back(h.row(u));
  return rows;
}

void check_targets(const FrameGraph& graph, const ImpnModel& model,
                   std::span<const std::size_t> targets) {
  if (targets.size() != graph.node_count()) {
    throw std::invalid_argument("expected " + std::to_string(graph.node_count()) +
                                " node labels, got " + std::to_string(targets.size()));
  }
  for (auto t : targets) {
    if (t >= model.class_count()) throw std::invalid_argument("node label out of range");
  }
}

}  // namespace

const char* aggregator_name(AggregatorKind kind) {
  return kind == AggregatorKind::kLstm ? "lstm" : "maxpool";
}

AggregatorKind aggregator_from_name(const std::string& name) {
  if (name == "maxpool") return AggregatorKind::kMaxPool;
  if (name == "lstm") return AggregatorKind::kLstm;
  throw std::invalid_argument("unknown aggregator '" + name + "'");
}

FeatureVector aggregate_maxpool(std::span<const FeatureVector> neighbors, std::size_t dim) {
  FeatureVector out(dim, 0.0);
  if (neighbors.empty()) return out;
  for (const auto& n : neighbors) {
    if (n.size() != dim) throw std::invalid_argument("neighbour dimensions differ");
  }
  out = neighbors.front();
  for (const auto& n : neighbors.subspan(1))
    for (std::size_t j = 0; j < dim; ++j) out[j] = std::max(out[j], n[j]);
  return out;
}

FeatureVector aggregate_lstm(std::span<const FeatureVector> neighbors, const LstmParams& params) {
  if (neighbors.empty()) return FeatureVector(params.hidden_dim(), 0.0);
  std::vector<std::span<const double>> seq;
  for (const auto& n : neighbors) {
    if (n.size() != neighbors.front().size()) {
      throw std::invalid_argument("neighbour dimensions differ");
    }
    seq.emplace_back(n);
  }
  return lstm_forward(seq, params).final_hidden();
}

std::size_t ImpnModel::input_dim() const {
  return layers.empty() ? head_weight.cols() : layers.front().input_dim();
}

std::optional<std::size_t> ImpnModel::class_index(const std::string& label) const {
  auto it = std::find(class_labels.begin(), class_labels.end(), label);
  if (it == class_labels.end()) return std::nullopt;
  return static_cast<std::size_t>(it - class_labels.begin());
}

std::vector<DenseMatrix*> ImpnModel::parameters() {
  std::vector<DenseMatrix*> out;
  for (auto& layer : layers) {
    out.push_back(&layer.weight);
    out.push_back(&layer.bias);
    if (layer.lstm) {
      out.push_back(&layer.lstm->input_weight);
      out.push_back(&layer.lstm->hidden_weight);
      out.push_back(&layer.lstm->bias);
    }
  }
  out.push_back(&head_weight);
  out.push_back(&head_bias);
  return out;
}

std::vector<const DenseMatrix*> ImpnModel::parameters() const {
  auto mut = const_cast<ImpnModel*>(this)->parameters();
  return {mut.begin(), mut.end()};
}

std::size_t ImpnModel::parameter_count() const {
  std::size_t n = 0;
  for (const auto* p : parameters()) n += p->size();
  return n;
}

ImpnModel ImpnModel::zeros_like() const {
  ImpnModel out = *this;
  for (auto* p : out.parameters()) p->fill(0.0);
  return out;
}

void ImpnModel::check() const {
  if (class_labels.empty()) throw std::invalid_argument("model needs at least one class");
  std::size_t width = input_dim();
  for (std::size_t k = 0; k < layers.size(); ++k) {
    const auto& layer = layers[k];
    if (layer.weight.cols() != 2 * width || layer.bias.rows() != layer.weight.rows() ||
        layer.bias.cols() != 1) {
      throw std::invalid_argument("layer " + std::to_string(k) + " dimensions do not chain");
    }
    if ((aggregator == AggregatorKind::kLstm) != layer.lstm.has_value()) {
      throw std::invalid_argument("layer " + std::to_string(k) +
                                  " aggregator parameters do not match the aggregator kind");
    }
    if (layer.lstm && (layer.lstm->input_dim() != width || layer.lstm->hidden_dim() != width)) {
      throw std::invalid_argument("layer " + std::to_string(k) + " lstm dimensions mismatch");
    }
    width = layer.output_dim();
  }
  if (head_weight.rows() != class_labels.size() || head_weight.cols() != width ||
      head_bias.rows() != class_labels.size() || head_bias.cols() != 1) {
    throw std::invalid_argument("output head dimensions mismatch");
  }
  for (const auto* p : parameters()) {
    if (!p->all_finite()) throw std::invalid_argument("model contains non-finite weights");
  }
}

ImpnModel init_model(const ImpnArchitecture& arch, std::uint64_t seed) {
  if (arch.input_dim == 0) throw std::invalid_argument("input dimension must be positive");
  if (arch.class_labels.empty()) throw std::invalid_argument("architecture needs classes");
  if (arch.depth > 0 && arch.hidden_dim == 0) throw std::invalid_argument("hidden dim is zero");
  auto rng = make_rng(seed, {0x1a9e5ULL});
  ImpnModel model;
  model.aggregator = arch.aggregator;
  model.class_labels = arch.class_labels;
  std::size_t width = arch.input_dim;
  for (std::size_t k = 0; k < arch.depth; ++k) {
    ImpnLayer layer{DenseMatrix(arch.hidden_dim, 2 * width), DenseMatrix(arch.hidden_dim, 1), {}};
    glorot(layer.weight, rng);
    if (arch.aggregator == AggregatorKind::kLstm) layer.lstm = LstmParams::random(width, width, rng);
    model.layers.push_back(std::move(layer));
    width = arch.hidden_dim;
  }
  model.head_weight = DenseMatrix(arch.class_labels.size(), width);
  glorot(model.head_weight, rng);
  model.head_bias = DenseMatrix(arch.class_labels.size(), 1);
  return model;
}

PredictionSet forward(const FrameGraph& graph, const ImpnModel& model, ForwardCache* cache) {
  PredictionSet out;
  const std::size_t n = graph.node_count();
  if (n == 0) return out;
  if (graph.feature_dim() != model.input_dim()) {
    throw std::invalid_argument("graph feature width " + std::to_string(graph.feature_dim()) +
                                " does not match model input width " +
                                std::to_string(model.input_dim()));
  }

  ForwardCache local;
  ForwardCache& c = cache ? *cache : local;
  c = ForwardCache{};
  c.hidden.push_back(graph.features());

  for (const auto& layer : model.layers) {
    const DenseMatrix& h = c.hidden.back();
    const std::size_t d_in = h.cols();
    DenseMatrix agg(n, d_in);
    std::vector<std::size_t> argmax;
    std::vector<LstmTrace> traces;
    if (model.aggregator == AggregatorKind::kMaxPool) {
      argmax.assign(n * d_in, kNoNeighbor);
      for (std::size_t v = 0; v < n; ++v) {
        for (std::size_t u = 0; u < n; ++u) {
          if (u == v) continue;
          for (std::size_t j = 0; j < d_in; ++j) {
            auto& winner = argmax[v * d_in + j];
            if (winner == kNoNeighbor || h(u, j) > agg(v, j)) {
              winner = u;
              agg(v, j) = h(u, j);
            }
          }
        }
      }
    } else {
      traces.reserve(n);
      for (std::size_t v = 0; v < n; ++v) {
        const auto rows = neighbor_rows(h, v);
        traces.push_back(lstm_forward(rows, *layer.lstm));
        if (!rows.empty()) {
          const auto& last = traces.back().hidden.back();
          std::copy(last.begin(), last.end(), agg.row(v).begin());
        }
      }
    }

    const std::size_t d_out = layer.output_dim();
    DenseMatrix z(n, d_out);
    DenseMatrix next(n, d_out);
    FeatureVector concat(2 * d_in);
    for (std::size_t v = 0; v < n; ++v) {
      std::copy(h.row(v).begin(), h.row(v).end(), concat.begin());
      std::copy(agg.row(v).begin(), agg.row(v).end(), concat.begin() + d_in);
      const auto zv = layer.weight.multiply(concat);
      for (std::size_t r = 0; r < d_out; ++r) {
        z(v, r) = zv[r] + layer.bias(r, 0);
        next(v, r) = std::max(z(v, r), 0.0);
      }
    }
    c.aggregated.push_back(std::move(agg));
    c.argmax.push_back(std::move(argmax));
    c.lstm.push_back(std::move(traces));
    c.pre_activation.push_back(std::move(z));
    c.hidden.push_back(std::move(next));
  }

  const DenseMatrix& final_h = c.hidden.back();
  const std::size_t classes = model.class_count();
  c.probabilities = DenseMatrix(n, classes);
  out.nodes.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    NodePrediction p;
    p.logits = model.head_weight.multiply(final_h.row(v));
    for (std::size_t r = 0; r < classes; ++r) p.logits[r] += model.head_bias(r, 0);
    p.probabilities = softmax(p.logits);
    p.class_index = static_cast<std::size_t>(
        std::max_element(p.probabilities.begin(), p.probabilities.end()) -
        p.probabilities.begin());
    p.label = model.class_labels[p.class_index];
    p.score = p.probabilities[p.class_index];
    p.box = graph.nodes()[v].box;
    p.source_index = graph.source_index(v);
    std::copy(p.probabilities.begin(), p.probabilities.end(), c.probabilities.row(v).begin());
    out.nodes.push_back(std::move(p));
  }
  return out;
}

PredictionSet predict_unseen(const ImpnModel& model, const FrameGraph& graph) {
  return forward(graph, model);
}

LabeledGraph make_labeled_graph(std::span<const DetectionRecord> detections, FrameSize frame_size,
                                std::span<const std::string> labels,
                                std::span<const std::string> class_labels) {
  if (labels.size() != detections.size()) {
    throw std::invalid_argument("every detection needs a label");
  }
  LabeledGraph out{build_frame_graph(detections, frame_size), {}};
  out.targets.reserve(detections.size());
  for (std::size_t v = 0; v < out.graph.node_count(); ++v) {
    const auto& label = labels[out.graph.source_index(v)];
    auto it = std::find(class_labels.begin(), class_labels.end(), label);
    if (it == class_labels.end()) throw std::invalid_argument("unknown label '" + label + "'");
    out.targets.push_back(static_cast<std::size_t>(it - class_labels.begin()));
  }
  return out;
}

double accumulate_loss_and_gradient(const FrameGraph& graph, const ImpnModel& model,
                                    std::span<const std::size_t> targets, ImpnModel& grad) {
  check_targets(graph, model, targets);
  const std::size_t n = graph.node_count();
  if (n == 0) return 0.0;
  ForwardCache c;
  forward(graph, model, &c);

  double loss = 0.0;
  const std::size_t classes = model.class_count();
  const std::size_t K = model.depth();
  DenseMatrix dh(n, c.hidden[K].cols());
  FeatureVector dlogits(classes);
  for (std::size_t v = 0; v < n; ++v) {
    loss += cross_entropy(c.probabilities.row(v), targets[v]);
    for (std::size_t r = 0; r < classes; ++r) {
      dlogits[r] = c.probabilities(v, r) - (r == targets[v] ? 1.0 : 0.0);
      grad.head_bias(r, 0) += dlogits[r];
    }
    grad.head_weight.add_outer(1.0, dlogits, c.hidden[K].row(v));
    model.head_weight.accumulate_transpose_multiply(dlogits, dh.row(v));
  }

  for (std::size_t k = K; k-- > 0;) {
    const auto& layer = model.layers[k];
    auto& glayer = grad.layers[k];
    const DenseMatrix& h_in = c.hidden[k];
    const DenseMatrix& agg = c.aggregated[k];
    const DenseMatrix& z = c.pre_activation[k];
    const std::size_t d_in = h_in.cols();
    const std::size_t d_out = layer.output_dim();
    const bool need_input_grad = k > 0;
    DenseMatrix dh_in(n, d_in);
    FeatureVector dz(d_out);
    FeatureVector concat(2 * d_in);
    FeatureVector dconcat(2 * d_in);
    for (std::size_t v = 0; v < n; ++v) {
      bool any = false;
      for (std::size_t r = 0; r < d_out; ++r) {
        dz[r] = z(v, r) > 0.0 ? dh(v, r) : 0.0;
        any = any || dz[r] != 0.0;
      }
      if (!any) continue;
      std::copy(h_in.row(v).begin(), h_in.row(v).end(), concat.begin());
      std::copy(agg.row(v).begin(), agg.row(v).end(), concat.begin() + d_in);
      glayer.weight.add_outer(1.0, dz, concat);
      for (std::size_t r = 0; r < d_out; ++r) glayer.bias(r, 0) += dz[r];

      std::fill(dconcat.begin(), dconcat.end(), 0.0);
      layer.weight.accumulate_transpose_multiply(dz, dconcat);
      std::span<const double> dagg(dconcat.data() + d_in, d_in);
      if (need_input_grad) {
        for (std::size_t j = 0; j < d_in; ++j) dh_in(v, j) += dconcat[j];
      }
      if (model.aggregator == AggregatorKind::kMaxPool) {
        if (!need_input_grad) continue;
        const auto& winners = c.argmax[k];
        for (std::size_t j = 0; j < d_in; ++j) {
          const std::size_t u = winners[v * d_in + j];
          if (u != kNoNeighbor) dh_in(u, j) += dagg[j];
        }
      } else {
        const auto rows = neighbor_rows(h_in, v);
        if (rows.empty()) continue;
        std::vector<FeatureVector> dx;
        lstm_backward(rows, c.lstm[k][v], *layer.lstm, dagg, *glayer.lstm, dx);
        if (!need_input_grad) continue;
        std::size_t t = 0;
        for (std::size_t u = 0; u < n; ++u) {
          if (u == v) continue;
          for (std::size_t j = 0; j < d_in; ++j) dh_in(u, j) += dx[t][j];
          ++t;
        }
      }
    }
    dh = std::move(dh_in);
  }
  return loss;
}

LossAndGradient loss_and_backward(const FrameGraph& graph, const ImpnModel& model,
                                  std::span<const std::size_t> targets) {
  LossAndGradient out{0.0, model.zeros_like()};
  out.loss = accumulate_loss_and_gradient(graph, model, targets, out.gradient);
  return out;
}

double graph_loss(const FrameGraph& graph, const ImpnModel& model,
                  std::span<const std::size_t> targets) {
  check_targets(graph, model, targets);
  ForwardCache c;
  forward(graph, model, &c);
  double loss = 0.0;
  for (std::size_t v = 0; v < graph.node_count(); ++v) {
    loss += cross_entropy(c.probabilities.row(v), targets[v]);
  }
  return loss;
}

void validate(const TrainConfig& config) {
  if (config.epochs == 0) throw std::invalid_argument("epochs must be >= 1");
  if (!(config.learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (config.early_stop_tolerance < 0.0) {
    throw std::invalid_argument("early-stop tolerance must be >= 0");
  }
}

FitResult fit_from(std::span<const LabeledGraph> dataset, ImpnModel initial,
                   const TrainConfig& config) {
  validate(config);
  if (dataset.empty()) throw std::invalid_argument("training set is empty");
  initial.check();
  std::size_t total_nodes = 0;
  for (const auto& g : dataset) {
    if (g.graph.node_count() > 0 && g.graph.feature_dim() != initial.input_dim()) {
      throw std::invalid_argument("training graph feature width does not match the model");
    }
    check_targets(g.graph, initial, g.targets);
    total_nodes += g.graph.node_count();
  }
  if (total_nodes == 0) throw std::invalid_argument("training set has no nodes");

  FitResult result{std::move(initial), {}};
  ImpnModel& model = result.model;
  auto params = model.parameters();
  auto state = AdamState::for_parameters(model.parameters(), {config.learning_rate});
  ImpnModel grad = model.zeros_like();
  auto grad_params = grad.parameters();
  std::vector<const DenseMatrix*> grad_view(grad_params.begin(), grad_params.end());

  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  auto rng = make_rng(config.seed, {0xf17ULL});
  const std::size_t batch =
      config.batch_size == 0 ? dataset.size() : std::min(config.batch_size, dataset.size());

  double best = std::numeric_limits<double>::infinity();
  std::size_t stale = 0;
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (batch < dataset.size()) std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      for (auto* p : grad_params) p->fill(0.0);
      const std::size_t end = std::min(start + batch, order.size());
      for (std::size_t i = start; i < end; ++i) {
        const auto& g = dataset[order[i]];
        epoch_loss += accumulate_loss_and_gradient(g.graph, model, g.targets, grad);
      }
      adam_step(params, grad_view, state);
    }
    epoch_loss /= static_cast<double>(total_nodes);
    result.epoch_losses.push_back(epoch_loss);
    if (config.early_stop_tolerance > 0.0) {
      if (epoch_loss < best - config.early_stop_tolerance) {
        best = epoch_loss;
        stale = 0;
      } else if (++stale >= config.patience) {
        break;
      }
    }
  }
  return result;
}

FitResult fit(std::span<const LabeledGraph> dataset, const ImpnArchitecture& arch,
              const TrainConfig& config) {
  return fit_from(dataset, init_model(arch, config.seed), config);
}

}  // namespace gazeloop
