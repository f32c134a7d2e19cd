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
#include <vector>

#include "gazeloop/numerics.hpp"
#include "gazeloop/rng.hpp"

namespace gazeloop {

/// Single-layer LSTM cell parameters. Gate blocks are stacked as
/// [input, forget, candidate, output], each hidden_dim rows.
struct LstmParams {
  DenseMatrix input_weight;   // 4H x D
  DenseMatrix hidden_weight;  // 4H x H
  DenseMatrix bias;           // 4H x 1

  std::size_t input_dim() const { return input_weight.cols(); }
  std::size_t hidden_dim() const { return hidden_weight.cols(); }

  static LstmParams zeros(std::size_t input_dim, std::size_t hidden_dim);
  /// Uniform(-1/sqrt(H), 1/sqrt(H)) weights, forget-gate bias 1.
  static LstmParams random(std::size_t input_dim, std::size_t hidden_dim, Rng& rng);

  friend bool operator==(const LstmParams&, const LstmParams&) = default;
};

/// Activations kept for backpropagation through time.
struct LstmTrace {
  std::vector<FeatureVector> gates;  // per step, 4H post-nonlinearity
  std::vector<FeatureVector> cell;   // per step c_t
  std::vector<FeatureVector> hidden; // per step h_t
  FeatureVector final_hidden() const;
};

/// Runs the cell over `sequence` from a zero state. An empty sequence leaves
/// the trace empty and the final hidden state zero.
LstmTrace lstm_forward(std::span<const std::span<const double>> sequence,
                       const LstmParams& params);

/// Accumulates parameter gradients into `grad` and input gradients into
/// `input_grads` (one entry per sequence element, each input_dim long) given
/// dL/dh_T.
void lstm_backward(std::span<const std::span<const double>> sequence, const LstmTrace& trace,
                   const LstmParams& params, std::span<const double> final_hidden_grad,
                   LstmParams& grad, std::vector<FeatureVector>& input_grads);

}  // namespace gazeloop
