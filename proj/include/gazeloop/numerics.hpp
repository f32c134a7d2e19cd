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

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gazeloop {

using FeatureVector = std::vector<double>;

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  /// Throws std::invalid_argument unless values.size() == rows * cols.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return values_.size(); }
  bool same_shape(const DenseMatrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values_).subspan(r * cols_, cols_);
  }
  std::span<double> row(std::size_t r) { return std::span<double>(values_).subspan(r * cols_, cols_); }

  /// this * x. Requires x.size() == cols().
  FeatureVector multiply(std::span<const double> x) const;
  /// this^T * y, accumulated into `out` (size cols()).
  void accumulate_transpose_multiply(std::span<const double> y, std::span<double> out) const;
  /// this += scale * u v^T.
  void add_outer(double scale, std::span<const double> u, std::span<const double> v);

  void fill(double value);
  bool all_finite() const;

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

/// Max-shifted softmax. Throws std::invalid_argument on empty or non-finite input.
FeatureVector softmax(std::span<const double> logits);

/// Probability floor applied inside cross_entropy.
inline constexpr double kProbabilityFloor = 1e-12;

/// -log(max(probs[target], kProbabilityFloor)).
double cross_entropy(std::span<const double> probs, std::size_t target_class);

struct AdamHyperParams {
  double learning_rate = 1e-2;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Moment accumulators for a fixed list of parameter matrices.
struct AdamState {
  AdamHyperParams hyper;
  std::size_t step = 0;
  std::vector<DenseMatrix> first_moment;
  std::vector<DenseMatrix> second_moment;

  /// Zeroed state shaped like `params`.
  static AdamState for_parameters(std::span<const DenseMatrix* const> params,
                                  AdamHyperParams hyper);
};

/// One bias-corrected Adam update, in place. Throws std::invalid_argument when
/// params, grads and state moments disagree in count or shape.
void adam_step(std::span<DenseMatrix* const> params, std::span<const DenseMatrix* const> grads,
               AdamState& state);

using ScalarFunction = std::function<double(std::span<const double>)>;

/// Central-difference gradient of `f` at `x`.
FeatureVector finite_diff_grad(const ScalarFunction& f, std::span<const double> x, double h);

/// |a - b| / max(|a|, |b|, floor). The floor keeps the ratio meaningful when both
/// values are at round-off level.
double relative_error(double a, double b, double floor = 1e-6);

}  // namespace gazeloop
