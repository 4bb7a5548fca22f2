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
#include "wclner/numcore/ops.hpp"

#include <cmath>
#include <string>

#include "wclner/error.hpp"
#include "wclner/numcore/kernels.hpp"

namespace wclner {
namespace {

using detail::Node;

void Acc(Node* n, const Matrix& g) {
  if (n->requires_grad) n->AccumulateGrad(g);
}

[[noreturn]] void Mismatch(const char* op, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(op) + ": incompatible shapes " +
                   a.shape().ToString() + " and " + b.shape().ToString());
}

Tensor Emit(Shape shape, Matrix value, std::initializer_list<Tensor> inputs,
            Tape::BackwardFn fn) {
  std::vector<Tensor> in(inputs);
  return Tape::Current().Record(std::move(shape), std::move(value), in,
                                std::move(fn));
}

void RequireRank(const char* op, const Tensor& t, int rank) {
  if (t.shape().rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank " +
                     std::to_string(rank) + ", got shape " +
                     t.shape().ToString());
  }
}

Tensor Unary(const Tensor& a, Matrix value,
             std::function<Matrix(const Matrix& gout, const Matrix& out)> d) {
  Matrix out = value;
  return Emit(a.shape(), std::move(value), {a},
              [out = std::move(out), d = std::move(d)](
                  const Matrix& g, std::span<Node* const> in) {
                Acc(in[0], d(g, out));
              });
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  const int ra = a.shape().rank();
  const int rb = b.shape().rank();
  if (ra == 0 || rb == 0) Mismatch("matmul", a, b);

  if (rb == 2) {
    // a is a row (vector) or a matrix; both are stored as rows x k.
    if (a.value().cols() != b.value().rows()) Mismatch("matmul", a, b);
    Matrix v = a.value() * b.value();
    Shape s = ra == 1 ? Shape::Vector(v.cols()) : Shape::Mat(v.rows(), v.cols());
    return Emit(std::move(s), std::move(v), {a, b},
                [av = a.value(), bv = b.value()](const Matrix& g,
                                                 std::span<Node* const> in) {
                  if (in[0]->requires_grad) Acc(in[0], g * bv.transpose());
                  if (in[1]->requires_grad) Acc(in[1], av.transpose() * g);
                });
  }
  // Matrix times column vector.
  if (ra != 2 || a.value().cols() != b.value().cols()) Mismatch("matmul", a, b);
  Matrix v = (a.value() * b.value().transpose()).transpose();
  Shape s = Shape::Vector(v.cols());
  return Emit(std::move(s), std::move(v), {a, b},
              [av = a.value(), bv = b.value()](const Matrix& g,
                                               std::span<Node* const> in) {
                if (in[0]->requires_grad) Acc(in[0], g.transpose() * bv);
                if (in[1]->requires_grad) Acc(in[1], g * av);
              });
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() == b.shape()) {
    return Emit(a.shape(), a.value() + b.value(), {a, b},
                [](const Matrix& g, std::span<Node* const> in) {
                  Acc(in[0], g);
                  Acc(in[1], g);
                });
  }
  if (a.shape().rank() == 2 && b.shape().rank() == 1 &&
      a.value().cols() == b.value().cols()) {
    Matrix v = a.value().rowwise() + RowVector(b.row_value());
    return Emit(a.shape(), std::move(v), {a, b},
                [](const Matrix& g, std::span<Node* const> in) {
                  Acc(in[0], g);
                  if (in[1]->requires_grad) Acc(in[1], g.colwise().sum());
                });
  }
  if (a.shape().rank() == 1 && b.shape().rank() == 2) return add(b, a);
  Mismatch("add", a, b);
}

Tensor sub(const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) Mismatch("sub", a, b);
  return Emit(a.shape(), a.value() - b.value(), {a, b},
              [](const Matrix& g, std::span<Node* const> in) {
                Acc(in[0], g);
                if (in[1]->requires_grad) Acc(in[1], -g);
              });
}

Tensor mul(const Tensor& a, const Tensor& b) {
  if (!(a.shape() == b.shape())) Mismatch("mul", a, b);
  Matrix v = a.value().cwiseProduct(b.value());
  return Emit(a.shape(), std::move(v), {a, b},
              [av = a.value(), bv = b.value()](const Matrix& g,
                                               std::span<Node* const> in) {
                if (in[0]->requires_grad) Acc(in[0], g.cwiseProduct(bv));
                if (in[1]->requires_grad) Acc(in[1], g.cwiseProduct(av));
              });
}

Tensor scale(const Tensor& a, double s) {
  return Emit(a.shape(), a.value() * s, {a},
              [s](const Matrix& g, std::span<Node* const> in) {
                Acc(in[0], g * s);
              });
}

Tensor tanh(const Tensor& a) {
  Matrix v = a.value().array().tanh().matrix();
  return Unary(a, std::move(v), [](const Matrix& g, const Matrix& y) {
    return Matrix(g.array() * (1.0 - y.array().square()));
  });
}

Tensor sigmoid(const Tensor& a) {
  Matrix v = a.value().unaryExpr([](double x) { return Sigmoid(x); });
  return Unary(a, std::move(v), [](const Matrix& g, const Matrix& y) {
    return Matrix(g.array() * y.array() * (1.0 - y.array()));
  });
}

Tensor relu(const Tensor& a) {
  Matrix v = a.value().cwiseMax(0.0);
  return Unary(a, std::move(v), [](const Matrix& g, const Matrix& y) {
    return Matrix((y.array() > 0.0).select(g, 0.0));
  });
}

Tensor softmax_rows(const Tensor& a) {
  if (a.shape().rank() == 0) {
    throw ShapeError("softmax_rows: needs a vector or matrix, got " +
                     a.shape().ToString());
  }
  Matrix v(a.value().rows(), a.value().cols());
  for (Index r = 0; r < v.rows(); ++r) v.row(r) = Softmax(a.value().row(r));
  return Unary(a, std::move(v), [](const Matrix& g, const Matrix& y) {
    Matrix gy = g.cwiseProduct(y);
    Eigen::VectorXd dots = gy.rowwise().sum();
    Matrix out = gy;
    for (Index r = 0; r < y.rows(); ++r) out.row(r) -= dots(r) * y.row(r);
    return out;
  });
}

Tensor logsumexp(const Tensor& v) {
  if (v.shape().rank() == 0) {
    throw ShapeError("logsumexp: needs a non-empty vector, got " +
                     v.shape().ToString());
  }
  const double lse = LogSumExp(v.value());
  Matrix p = (v.value().array() - lse).exp().matrix();
  return Emit(Shape::Scalar(), Matrix::Constant(1, 1, lse), {v},
              [p = std::move(p)](const Matrix& g, std::span<Node* const> in) {
                Acc(in[0], p * g(0, 0));
              });
}

Tensor concat(std::span<const Tensor> parts, int axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  bool all_flat = true;
  bool all_mat = true;
  for (const Tensor& t : parts) {
    all_flat = all_flat && t.shape().rank() <= 1;
    all_mat = all_mat && t.shape().rank() == 2;
  }
  auto fail = [&]() {
    std::string shapes;
    for (const Tensor& t : parts) {
      if (!shapes.empty()) shapes += " and ";
      shapes += t.shape().ToString();
    }
    throw ShapeError("concat(axis=" + std::to_string(axis) +
                     "): incompatible shapes " + shapes);
  };

  std::vector<Index> offsets;
  Matrix v;
  Shape shape;
  if (all_flat && axis == 0) {
    Index n = 0;
    for (const Tensor& t : parts) {
      offsets.push_back(n);
      n += t.value().cols();
    }
    v.resize(1, n);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      v.middleCols(offsets[i], parts[i].value().cols()) = parts[i].value();
    }
    shape = Shape::Vector(n);
  } else if (all_mat && axis == 0) {
    const Index cols = parts[0].value().cols();
    Index n = 0;
    for (const Tensor& t : parts) {
      if (t.value().cols() != cols) fail();
      offsets.push_back(n);
      n += t.value().rows();
    }
    v.resize(n, cols);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      v.middleRows(offsets[i], parts[i].value().rows()) = parts[i].value();
    }
    shape = Shape::Mat(n, cols);
  } else if (all_mat && axis == 1) {
    const Index rows = parts[0].value().rows();
    Index n = 0;
    for (const Tensor& t : parts) {
      if (t.value().rows() != rows) fail();
      offsets.push_back(n);
      n += t.value().cols();
    }
    v.resize(rows, n);
    for (std::size_t i = 0; i < parts.size(); ++i) {
      v.middleCols(offsets[i], parts[i].value().cols()) = parts[i].value();
    }
    shape = Shape::Mat(rows, n);
  } else {
    fail();
  }

  const bool by_rows = all_mat && axis == 0;
  std::vector<Index> sizes;
  for (const Tensor& t : parts) {
    sizes.push_back(by_rows ? t.value().rows() : t.value().cols());
  }
  return Tape::Current().Record(
      std::move(shape), std::move(v), parts,
      [offsets, sizes, by_rows](const Matrix& g, std::span<Node* const> in) {
        for (std::size_t i = 0; i < in.size(); ++i) {
          if (!in[i]->requires_grad) continue;
          if (by_rows) {
            Acc(in[i], g.middleRows(offsets[i], sizes[i]));
          } else {
            Acc(in[i], g.middleCols(offsets[i], sizes[i]));
          }
        }
      });
}

Tensor dot(const Tensor& a, const Tensor& b) {
  if (a.shape().rank() != 1 || !(a.shape() == b.shape())) Mismatch("dot", a, b);
  const double v = a.value().cwiseProduct(b.value()).sum();
  return Emit(Shape::Scalar(), Matrix::Constant(1, 1, v), {a, b},
              [av = a.value(), bv = b.value()](const Matrix& g,
                                               std::span<Node* const> in) {
                if (in[0]->requires_grad) Acc(in[0], bv * g(0, 0));
                if (in[1]->requires_grad) Acc(in[1], av * g(0, 0));
              });
}

Tensor normalize(const Tensor& v) {
  RequireRank("normalize", v, 1);
  const double norm = v.value().norm();
  if (norm <= kNormalizeEpsilon) {
    return Emit(v.shape(), Matrix::Zero(1, v.value().cols()), {v},
                [](const Matrix& g, std::span<Node* const> in) {
                  Acc(in[0], Matrix::Zero(g.rows(), g.cols()));
                });
  }
  Matrix y = v.value() / norm;
  return Emit(v.shape(), y, {v},
              [y, norm](const Matrix& g, std::span<Node* const> in) {
                const double gy = g.cwiseProduct(y).sum();
                Acc(in[0], (g - gy * y) / norm);
              });
}

Tensor mean_rows(const Tensor& m) {
  if (m.shape().rank() == 0) {
    throw ShapeError("mean_rows: needs a vector or matrix, got " +
                     m.shape().ToString());
  }
  const Index rows = m.value().rows();
  Matrix v = m.value().colwise().mean();
  Shape s = Shape::Vector(v.cols());
  return Emit(std::move(s), std::move(v), {m},
              [rows](const Matrix& g, std::span<Node* const> in) {
                Acc(in[0], g.replicate(rows, 1) / static_cast<double>(rows));
              });
}

Tensor sum(const Tensor& a) {
  const Index r = a.value().rows();
  const Index c = a.value().cols();
  return Emit(Shape::Scalar(), Matrix::Constant(1, 1, a.value().sum()), {a},
              [r, c](const Matrix& g, std::span<Node* const> in) {
                Acc(in[0], Matrix::Constant(r, c, g(0, 0)));
              });
}

Tensor gather_rows(const Tensor& table, std::span<const Index> ids) {
  RequireRank("gather_rows", table, 2);
  if (ids.empty()) throw ShapeError("gather_rows: empty id list");
  const Index n = table.value().rows();
  Matrix v(static_cast<Index>(ids.size()), table.value().cols());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (ids[i] < 0 || ids[i] >= n) {
      throw ShapeError("gather_rows: id " + std::to_string(ids[i]) +
                       " outside table of shape " + table.shape().ToString());
    }
    v.row(static_cast<Index>(i)) = table.value().row(ids[i]);
  }
  std::vector<Index> idv(ids.begin(), ids.end());
  const Index cols = table.value().cols();
  Shape s = Shape::Mat(v.rows(), v.cols());
  return Emit(std::move(s), std::move(v), {table},
              [idv = std::move(idv), n, cols](const Matrix& g,
                                              std::span<Node* const> in) {
                Node* t = in[0];
                if (!t->requires_grad) return;
                if (t->grad.size() == 0) t->grad = Matrix::Zero(n, cols);
                for (std::size_t i = 0; i < idv.size(); ++i) {
                  t->grad.row(idv[i]) += g.row(static_cast<Index>(i));
                }
              });
}

Tensor row(const Tensor& m, Index i) {
  RequireRank("row", m, 2);
  if (i < 0 || i >= m.value().rows()) {
    throw ShapeError("row: index " + std::to_string(i) + " outside shape " +
                     m.shape().ToString());
  }
  const Index r = m.value().rows();
  const Index c = m.value().cols();
  return Emit(Shape::Vector(c), m.value().row(i), {m},
              [i, r, c](const Matrix& g, std::span<Node* const> in) {
                Node* t = in[0];
                if (!t->requires_grad) return;
                if (t->grad.size() == 0) t->grad = Matrix::Zero(r, c);
                t->grad.row(i) += g;
              });
}

Tensor stack_rows(std::span<const Tensor> rows) {
  if (rows.empty()) throw ShapeError("stack_rows: no inputs");
  const Shape first = rows[0].shape();
  if (first.rank() != 1) {
    throw ShapeError("stack_rows: rows must be vectors, got " +
                     first.ToString());
  }
  Matrix v(static_cast<Index>(rows.size()), first.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!(rows[i].shape() == first)) {
      throw ShapeError("stack_rows: incompatible shapes " + first.ToString() +
                       " and " + rows[i].shape().ToString());
    }
    v.row(static_cast<Index>(i)) = rows[i].value();
  }
  Shape s = Shape::Mat(v.rows(), v.cols());
  return Tape::Current().Record(
      std::move(s), std::move(v), rows,
      [](const Matrix& g, std::span<Node* const> in) {
        for (std::size_t i = 0; i < in.size(); ++i) {
          if (in[i]->requires_grad) Acc(in[i], g.row(static_cast<Index>(i)));
        }
      });
}

Tensor slice(const Tensor& v, Index start, Index len) {
  RequireRank("slice", v, 1);
  const Index n = v.value().cols();
  if (start < 0 || len <= 0 || start + len > n) {
    throw ShapeError("slice: range [" + std::to_string(start) + ", " +
                     std::to_string(start + len) + ") outside shape " +
                     v.shape().ToString());
  }
  return Emit(Shape::Vector(len), v.value().middleCols(start, len), {v},
              [start, len, n](const Matrix& g, std::span<Node* const> in) {
                Node* t = in[0];
                if (!t->requires_grad) return;
                if (t->grad.size() == 0) t->grad = Matrix::Zero(1, n);
                t->grad.middleCols(start, len) += g;
              });
}

Tensor element(const Tensor& v, Index i) {
  RequireRank("element", v, 1);
  const Index n = v.value().cols();
  if (i < 0 || i >= n) {
    throw ShapeError("element: index " + std::to_string(i) +
                     " outside shape " + v.shape().ToString());
  }
  return Emit(Shape::Scalar(), Matrix::Constant(1, 1, v.value()(0, i)), {v},
              [i, n](const Matrix& g, std::span<Node* const> in) {
                Node* t = in[0];
                if (!t->requires_grad) return;
                if (t->grad.size() == 0) t->grad = Matrix::Zero(1, n);
                t->grad(0, i) += g(0, 0);
              });
}

}  // namespace wclner
