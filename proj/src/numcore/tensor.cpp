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
#include "wclner/numcore/tensor.hpp"

#include <sstream>

#include "wclner/error.hpp"

namespace wclner {

Shape::Shape(std::initializer_list<Index> extents) : extents_(extents) {
  if (extents_.size() > 2) throw ShapeError("tensors are at most rank 2");
  for (Index e : extents_) {
    if (e <= 0) throw ShapeError("extents must be positive: " + ToString());
  }
}

Shape::Shape(std::vector<Index> extents) : extents_(std::move(extents)) {
  if (extents_.size() > 2) throw ShapeError("tensors are at most rank 2");
  for (Index e : extents_) {
    if (e <= 0) throw ShapeError("extents must be positive: " + ToString());
  }
}

Index Shape::size() const {
  Index n = 1;
  for (Index e : extents_) n *= e;
  return n;
}

std::string Shape::ToString() const {
  std::ostringstream out;
  out << '[';
  for (std::size_t i = 0; i < extents_.size(); ++i) {
    if (i) out << ", ";
    out << extents_[i];
  }
  out << ']';
  return out.str();
}

namespace detail {

void Node::AccumulateGrad(const Matrix& g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

}  // namespace detail

Tensor::Tensor(Shape shape, Matrix values, bool requires_grad)
    : node_(std::make_shared<detail::Node>()) {
  if (values.rows() != shape.rows() || values.cols() != shape.cols()) {
    throw ShapeError("values of size " + std::to_string(values.rows()) + "x" +
                     std::to_string(values.cols()) +
                     " do not fit shape " + shape.ToString());
  }
  node_->shape = std::move(shape);
  node_->value = std::move(values);
  node_->requires_grad = requires_grad;
}

Tensor Tensor::Zeros(const Shape& shape, bool requires_grad) {
  return Tensor(shape, Matrix::Zero(shape.rows(), shape.cols()),
                requires_grad);
}

Tensor Tensor::Scalar(double v, bool requires_grad) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return Tensor(Shape::Scalar(), std::move(m), requires_grad);
}

Tensor Tensor::FromRow(const RowVector& v, bool requires_grad) {
  if (v.size() == 0) throw ShapeError("empty vector");
  return Tensor(Shape::Vector(v.size()), Matrix(v), requires_grad);
}

Tensor Tensor::Vector(std::initializer_list<double> v, bool requires_grad) {
  RowVector row(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) row(i++) = x;
  return FromRow(row, requires_grad);
}

Tensor Tensor::FromMatrix(const Matrix& m, bool requires_grad) {
  return Tensor(Shape::Mat(m.rows(), m.cols()), m, requires_grad);
}

double Tensor::item() const {
  if (shape().size() != 1) {
    throw ShapeError("item() needs a single-entry tensor, got " +
                     shape().ToString());
  }
  return value()(0, 0);
}

RowVector Tensor::row_value() const {
  return Eigen::Map<const RowVector>(value().data(), value().size());
}

Matrix Tensor::grad() const {
  if (has_grad()) return node_->grad;
  return Matrix::Zero(value().rows(), value().cols());
}

Tensor Tensor::Detach() const { return Tensor(shape(), value(), false); }

Tensor Tensor::Clone() const {
  return Tensor(shape(), value(), requires_grad());
}

Tape& Tape::Current() {
  thread_local Tape tape;
  return tape;
}

Tensor Tape::Record(Shape shape, Matrix value, std::span<const Tensor> inputs,
                    BackwardFn fn) {
  bool track = false;
  if (recording_) {
    for (const Tensor& t : inputs) track = track || t.requires_grad();
  }
  Tensor out(std::move(shape), std::move(value), track);
  if (track) {
    Entry e;
    e.output = out.node();
    e.inputs.reserve(inputs.size());
    for (const Tensor& t : inputs) e.inputs.push_back(t.node());
    e.fn = std::move(fn);
    entries_.push_back(std::move(e));
  }
  return out;
}

void Tape::Backward(const Tensor& loss) {
  if (loss.shape().rank() != 0) {
    throw ShapeError("backward needs a scalar loss, got shape " +
                     loss.shape().ToString());
  }
  if (!loss.requires_grad()) {
    entries_.clear();
    return;
  }
  loss.node()->AccumulateGrad(Matrix::Ones(1, 1));

  std::vector<detail::Node*> raw;
  for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
    if (it->output->grad.size() == 0) continue;
    raw.clear();
    for (const auto& n : it->inputs) raw.push_back(n.get());
    it->fn(it->output->grad, raw);
  }
  entries_.clear();
}

NoGradGuard::NoGradGuard() : previous_(Tape::Current().recording_) {
  Tape::Current().recording_ = false;
}

NoGradGuard::~NoGradGuard() { Tape::Current().recording_ = previous_; }

void backward(const Tensor& loss) { Tape::Current().Backward(loss); }

}  // namespace wclner
