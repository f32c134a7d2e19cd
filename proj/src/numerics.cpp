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

#include "gazeloop/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace gazeloop {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows_ * cols_) {
    throw std::invalid_argument("matrix value count " + std::to_string(values_.size()) +
                                " does not match " + std::to_string(rows_) + "x" +
                                std::to_string(cols_));
  }
}

FeatureVector DenseMatrix::multiply(std::span<const double> x) const {
  if (x.size() != cols_) throw std::invalid_argument("matrix-vector dimension mismatch");
  FeatureVector out(rows_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    const double* w = values_.data() + r * cols_;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols_; ++c) acc += w[c] * x[c];
    out[r] = acc;
  }
  return out;
}

void DenseMatrix::accumulate_transpose_multiply(std::span<const double> y,
                                                std::span<double> out) const {
  if (y.size() != rows_ || out.size() != cols_) {
    throw std::invalid_argument("transpose product dimension mismatch");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    const double yr = y[r];
    if (yr == 0.0) continue;
    const double* w = values_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) out[c] += w[c] * yr;
  }
}

void DenseMatrix::add_outer(double scale, std::span<const double> u, std::span<const double> v) {
  if (u.size() != rows_ || v.size() != cols_) {
    throw std::invalid_argument("outer product dimension mismatch");
  }
  for (std::size_t r = 0; r < rows_; ++r) {
    const double ur = scale * u[r];
    if (ur == 0.0) continue;
    double* w = values_.data() + r * cols_;
    for (std::size_t c = 0; c < cols_; ++c) w[c] += ur * v[c];
  }
}

void DenseMatrix::fill(double value) { std::fill(values_.begin(), values_.end(), value); }

bool DenseMatrix::all_finite() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

FeatureVector softmax(std::span<const double> logits) {
  if (logits.empty()) throw std::invalid_argument("softmax of empty vector");
  double peak = logits[0];
  for (double v : logits) {
    if (!std::isfinite(v)) throw std::invalid_argument("softmax input is not finite");
    peak = std::max(peak, v);
  }
  FeatureVector out(logits.size());
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

double cross_entropy(std::span<const double> probs, std::size_t target_class) {
  if (target_class >= probs.size()) {
    throw std::invalid_argument("target class " + std::to_string(target_class) +
                                " out of range for " + std::to_string(probs.size()) + " classes");
  }
  return -std::log(std::max(probs[target_class], kProbabilityFloor));
}

AdamState AdamState::for_parameters(std::span<const DenseMatrix* const> params,
                                    AdamHyperParams hyper) {
  AdamState state;
  state.hyper = hyper;
  for (const DenseMatrix* p : params) {
    state.first_moment.emplace_back(p->rows(), p->cols());
    state.second_moment.emplace_back(p->rows(), p->cols());
  }
  return state;
}

void adam_step(std::span<DenseMatrix* const> params, std::span<const DenseMatrix* const> grads,
               AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.first_moment.size() ||
      params.size() != state.second_moment.size()) {
    throw std::invalid_argument("adam_step: parameter, gradient and moment counts differ");
  }
  for (std::size_t i = 0; i < params.size(); ++i) {
    if (!params[i]->same_shape(*grads[i]) || !params[i]->same_shape(state.first_moment[i]) ||
        !params[i]->same_shape(state.second_moment[i])) {
      throw std::invalid_argument("adam_step: shape mismatch at parameter " + std::to_string(i));
    }
  }
  const auto& h = state.hyper;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double correction1 = 1.0 - std::pow(h.beta1, t);
  const double correction2 = 1.0 - std::pow(h.beta2, t);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto p = params[i]->values();
    auto g = grads[i]->values();
    auto m = state.first_moment[i].values();
    auto v = state.second_moment[i].values();
    for (std::size_t j = 0; j < p.size(); ++j) {
      m[j] = h.beta1 * m[j] + (1.0 - h.beta1) * g[j];
      v[j] = h.beta2 * v[j] + (1.0 - h.beta2) * g[j] * g[j];
      const double m_hat = m[j] / correction1;
      const double v_hat = v[j] / correction2;
      p[j] -= h.learning_rate * m_hat / (std::sqrt(v_hat) + h.epsilon);
    }
  }
}

FeatureVector finite_diff_grad(const ScalarFunction& f, std::span<const double> x, double h) {
  if (!(h > 0.0)) throw std::invalid_argument("finite difference step must be positive");
  std::vector<double> probe(x.begin(), x.end());
  FeatureVector grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + h;
    const double up = f(probe);
    probe[i] = saved - h;
    const double down = f(probe);
    probe[i] = saved;
    grad[i] = (up - down) / (2.0 * h);
  }
  return grad;
}

double relative_error(double a, double b, double floor) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

}  // namespace gazeloop
