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
#ifndef WCLNER_NUMCORE_OPS_HPP_
#define WCLNER_NUMCORE_OPS_HPP_

#include <span>
#include <vector>

#include "wclner/numcore/tensor.hpp"

// Differentiable op catalog. Every op validates shapes (throwing ShapeError
// with both operand shapes) and is taped when an operand requires a gradient.
namespace wclner {

// Vectors act as rows on the left and as columns on the right:
// [r,k]x[k,c] -> [r,c], [k]x[k,c] -> [c], [r,k]x[k] -> [r].
Tensor matmul(const Tensor& a, const Tensor& b);

// Same-shape sum, or a matrix [r,c] plus a vector [c] broadcast over rows.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
// Elementwise product of same-shape tensors.
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, double s);

Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor relu(const Tensor& a);

// Softmax of each row of a matrix, or of the whole vector.
Tensor softmax_rows(const Tensor& a);
// log(sum(exp(v))) over every entry; scalar result.
Tensor logsumexp(const Tensor& v);

// Axis 0 joins scalars/vectors end to end, or stacks matrix rows; axis 1
// joins matrix columns.
Tensor concat(std::span<const Tensor> parts, int axis);

Tensor dot(const Tensor& a, const Tensor& b);
// v / |v|; the zero vector (with zero gradient) when |v| <= 1e-9.
Tensor normalize(const Tensor& v);
// Mean over the rows of a matrix; a vector is its own mean.
Tensor mean_rows(const Tensor& m);
Tensor sum(const Tensor& a);

// Rows `ids` of `table` as a [ids.size(), cols] matrix.
Tensor gather_rows(const Tensor& table, std::span<const Index> ids);
// Row i of a matrix as a vector.
Tensor row(const Tensor& m, Index i);
// Stacks equal-length vectors into a matrix.
Tensor stack_rows(std::span<const Tensor> rows);
// Entries [start, start + len) of a vector.
Tensor slice(const Tensor& v, Index start, Index len);
// Entry i of a vector as a scalar.
Tensor element(const Tensor& v, Index i);

inline Tensor operator+(const Tensor& a, const Tensor& b) { return add(a, b); }
inline Tensor operator-(const Tensor& a, const Tensor& b) { return sub(a, b); }
inline Tensor operator*(const Tensor& a, double s) { return scale(a, s); }
inline Tensor operator*(double s, const Tensor& a) { return scale(a, s); }

inline constexpr double kNormalizeEpsilon = 1e-9;

}  // namespace wclner

#endif  // WCLNER_NUMCORE_OPS_HPP_
