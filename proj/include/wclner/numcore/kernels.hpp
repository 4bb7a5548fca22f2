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
#ifndef WCLNER_NUMCORE_KERNELS_HPP_
#define WCLNER_NUMCORE_KERNELS_HPP_

#include <cmath>
#include <limits>

#include <Eigen/Core>

namespace wclner {

// Stable log(sum(exp(x))) over every coefficient of x. Returns -inf when all
// entries are -inf.
template <typename Derived>
typename Derived::Scalar LogSumExp(const Eigen::DenseBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  const Scalar hi = x.maxCoeff();
  if (!std::isfinite(hi)) return hi;
  return hi + std::log((x.derived().array() - hi).exp().sum());
}

// Softmax over every coefficient of x.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Derived::RowsAtCompileTime,
              Derived::ColsAtCompileTime>
Softmax(const Eigen::DenseBase<Derived>& x) {
  const auto lse = LogSumExp(x);
  return (x.derived().array() - lse).exp().matrix();
}

template <typename Scalar>
Scalar Sigmoid(Scalar x) {
  if (x >= 0) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

}  // namespace wclner

#endif  // WCLNER_NUMCORE_KERNELS_HPP_
