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

#include "gazeloop/lstm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gazeloop {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

LstmParams LstmParams::zeros(std::size_t input_dim, std::size_t hidden_dim) {
  return {DenseMatrix(4 * hidden_dim, input_dim), DenseMatrix(4 * hidden_dim, hidden_dim),
          DenseMatrix(4 * hidden_dim, 1)};
}

LstmParams LstmParams::random(std::size_t input_dim, std::size_t hidden_dim, Rng& rng) {
  auto p = zeros(input_dim, hidden_dim);
  const double limit = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(hidden_dim, 1)));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : p.input_weight.values()) v = dist(rng);
  for (double& v : p.hidden_weight.values()) v = dist(rng);
  for (std::size_t r = hidden_dim; r < 2 * hidden_dim; ++r) p.bias(r, 0) = 1.0;
  return p;
}

FeatureVector LstmTrace::final_hidden() const {
  return hidden.empty() ? FeatureVector{} : hidden.back();
}

LstmTrace lstm_forward(std::span<const std::span<const double>> sequence,
                       const LstmParams& params) {
  const std::size_t H = params.hidden_dim();
  const std::size_t D = params.input_dim();
  LstmTrace trace;
  FeatureVector h(H, 0.0);
  FeatureVector c(H, 0.0);
  for (const auto& x : sequence) {
    if (x.size() != D) throw std::invalid_argument("lstm input dimension mismatch");
    FeatureVector a = params.input_weight.multiply(x);
    const FeatureVector ah = params.hidden_weight.multiply(h);
    for (std::size_t r = 0; r < 4 * H; ++r) a[r] += ah[r] + params.bias(r, 0);
    for (std::size_t j = 0; j < H; ++j) {
      a[j] = sigmoid(a[j]);                  // input gate
      a[H + j] = sigmoid(a[H + j]);          // forget gate
      a[2 * H + j] = std::tanh(a[2 * H + j]);  // candidate
      a[3 * H + j] = sigmoid(a[3 * H + j]);  // output gate
      c[j] = a[H + j] * c[j] + a[j] * a[2 * H + j];
      h[j] = a[3 * H + j] * std::tanh(c[j]);
    }
    trace.gates.push_back(std::move(a));
    trace.cell.push_back(c);
    trace.hidden.push_back(h);
  }
  return trace;
}

void lstm_backward(std::span<const std::span<const double>> sequence, const LstmTrace& trace,
                   const LstmParams& params, std::span<const double> final_hidden_grad,
                   LstmParams& grad, std::vector<FeatureVector>& input_grads) {
  const std::size_t H = params.hidden_dim();
  const std::size_t T = sequence.size();
  input_grads.assign(T, FeatureVector(params.input_dim(), 0.0));
  if (T == 0) return;
  if (final_hidden_grad.size() != H) throw std::invalid_argument("lstm gradient size mismatch");

  FeatureVector dh(final_hidden_grad.begin(), final_hidden_grad.end());
  FeatureVector dc(H, 0.0);
  FeatureVector da(4 * H);
  const FeatureVector zeros(H, 0.0);
  for (std::size_t step = T; step-- > 0;) {
    const auto& g = trace.gates[step];
    const auto& c = trace.cell[step];
    const FeatureVector& c_prev = step > 0 ? trace.cell[step - 1] : zeros;
    const FeatureVector& h_prev = step > 0 ? trace.hidden[step - 1] : zeros;
    for (std::size_t j = 0; j < H; ++j) {
      const double i = g[j], f = g[H + j], cand = g[2 * H + j], o = g[3 * H + j];
      const double tc = std::tanh(c[j]);
      const double d_o = dh[j] * tc;
      dc[j] += dh[j] * o * (1.0 - tc * tc);
      da[j] = dc[j] * cand * i * (1.0 - i);
      da[H + j] = dc[j] * c_prev[j] * f * (1.0 - f);
      da[2 * H + j] = dc[j] * i * (1.0 - cand * cand);
      da[3 * H + j] = d_o * o * (1.0 - o);
      dc[j] *= f;
    }
    grad.input_weight.add_outer(1.0, da, sequence[step]);
    grad.hidden_weight.add_outer(1.0, da, h_prev);
    for (std::size_t r = 0; r < 4 * H; ++r) grad.bias(r, 0) += da[r];
    params.input_weight.accumulate_transpose_multiply(da, input_grads[step]);
    std::fill(dh.begin(), dh.end(), 0.0);
    params.hidden_weight.accumulate_transpose_multiply(da, dh);
  }
}

}  // namespace gazeloop
