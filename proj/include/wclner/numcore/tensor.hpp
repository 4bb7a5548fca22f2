// Copyright 2026 The wclner Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#ifndef WCLNER_NUMCORE_TENSOR_HPP_
#define WCLNER_NUMCORE_TENSOR_HPP_

#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace wclner {

using Index = Eigen::Index;

// Row-major dense storage shared by every tensor.
using Matrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::Matrix<double, 1, Eigen::Dynamic>;

// Extents of a tensor of rank 0 (scalar), 1 (vector) or 2 (matrix).
//
// Storage is always a Matrix: a scalar is 1x1, a vector of n entries is a
// single 1xn row, a matrix is rows x cols.
class Shape {
 public:
  Shape() = default;
  Shape(std::initializer_list<Index> extents);
  explicit Shape(std::vector<Index> extents);

  static Shape Scalar() { return Shape(); }
  static Shape Vector(Index n) { return Shape({n}); }
  static Shape Mat(Index rows, Index cols) { return Shape({rows, cols}); }

  int rank() const { return static_cast<int>(extents_.size()); }
  const std::vector<Index>& extents() const { return extents_; }
  Index size() const;

  // Storage extents.
  Index rows() const { return rank() == 2 ? extents_[0] : 1; }
  Index cols() const { return rank() == 0 ? 1 : extents_.back(); }

  std::string ToString() const;

  friend bool operator==(const Shape&, const Shape&) = default;

 private:
  std::vector<Index> extents_;
};

namespace detail {

struct Node {
  Shape shape;
  Matrix value;
  Matrix grad;  // empty until a gradient is accumulated
  bool requires_grad = false;

  void AccumulateGrad(const Matrix& g);
};

}  // namespace detail

// Handle to a dense array with an optional gradient slot.
//
// Copies share the underlying storage; use Clone() for an independent value.
class Tensor {
 public:
  Tensor() = default;
  Tensor(Shape shape, Matrix values, bool requires_grad = false);

  static Tensor Zeros(const Shape& shape, bool requires_grad = false);
  static Tensor Scalar(double v, bool requires_grad = false);
  static Tensor FromRow(const RowVector& v, bool requires_grad = false);
  static Tensor Vector(std::initializer_list<double> v,
                       bool requires_grad = false);
  static Tensor FromMatrix(const Matrix& m, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  const Matrix& value() const { return node_->value; }
  Matrix& mutable_value() { return node_->value; }

  // Value of a rank-0 tensor.
  double item() const;
  // Storage as a flat row (vector and scalar tensors).
  RowVector row_value() const;

  bool requires_grad() const { return node_->requires_grad; }
  void set_requires_grad(bool on) { node_->requires_grad = on; }
  bool has_grad() const { return node_->grad.size() != 0; }
  // Gradient, or a zero matrix when none has been accumulated.
  Matrix grad() const;
  void clear_grad() { node_->grad.resize(0, 0); }

  // New leaf with the same value and no gradient history.
  Tensor Detach() const;
  // Deep copy, keeping the requires_grad flag.
  Tensor Clone() const;

  const std::shared_ptr<detail::Node>& node() const { return node_; }

 private:
  std::shared_ptr<detail::Node> node_;
};

// Record of executed ops for reverse-mode differentiation.
//
// One tape per thread. Ops are recorded only while recording is enabled and at
// least one input requires a gradient. Backward() replays the record in
// reverse and then clears it.
class Tape {
 public:
  using BackwardFn =
      std::function<void(const Matrix& out_grad,
                         std::span<detail::Node* const> inputs)>;

  static Tape& Current();

  bool recording() const { return recording_; }
  std::size_t size() const { return entries_.size(); }
  void Clear() { entries_.clear(); }

  void Backward(const Tensor& loss);

  // Builds an op result. When any input requires a gradient (and recording is
  // on) the result is marked trainable and `fn` is taped.
  Tensor Record(Shape shape, Matrix value, std::span<const Tensor> inputs,
                BackwardFn fn);

 private:
  friend class NoGradGuard;

  struct Entry {
    std::shared_ptr<detail::Node> output;
    std::vector<std::shared_ptr<detail::Node>> inputs;
    BackwardFn fn;
  };

  std::vector<Entry> entries_;
  bool recording_ = true;
};

// Disables op recording for its lifetime.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

// Populates gradients of every trainable tensor reachable from `loss`.
void backward(const Tensor& loss);

}  // namespace wclner

#endif  // WCLNER_NUMCORE_TENSOR_HPP_
