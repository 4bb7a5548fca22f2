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
#ifndef WCLNER_NUMCORE_PARAM_STORE_HPP_
#define WCLNER_NUMCORE_PARAM_STORE_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "wclner/numcore/tensor.hpp"

namespace wclner {

// Named trainable arrays plus string metadata (vocabulary, tag set, dims).
//
// Entries are kept sorted by name so iteration and checkpoints are
// deterministic. Copying a store shares tensors; Clone() deep-copies.
class ParamStore {
 public:
  // Inserts or replaces `name`. Returns the stored handle.
  Tensor& Set(const std::string& name, Tensor t);
  // Creates a trainable parameter with entries drawn from U(-scale, scale).
  Tensor& CreateUniform(const std::string& name, const Shape& shape,
                        double scale, std::mt19937_64& rng);
  Tensor& CreateZeros(const std::string& name, const Shape& shape);

  bool contains(const std::string& name) const;
  Tensor& at(const std::string& name);
  const Tensor& at(const std::string& name) const;
  std::size_t size() const { return params_.size(); }
  std::vector<std::string> names() const;

  const std::map<std::string, Tensor>& params() const { return params_; }
  std::map<std::string, std::string>& meta() { return meta_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }

  ParamStore Clone() const;
  // Copies every entry whose name starts with `prefix` into `out`.
  void ExtractPrefix(const std::string& prefix, ParamStore& out) const;

  void SetRequiresGrad(bool on);
  void ClearGrads();

 private:
  std::map<std::string, Tensor> params_;
  std::map<std::string, std::string> meta_;
};

// Plain gradient descent: value -= lr * grad for every parameter holding a
// gradient, then clears gradients. Rejects the whole step (no update) when any
// gradient is non-finite, naming the offending parameters.
void sgd_step(ParamStore& params, double lr);

// Checkpoint container:
//   "WCLB" | u32 version | u64 tensor count |
//   per tensor: u32 name length, name, u32 rank, u64 extents..., f64 values |
//   u64 meta count | per entry: u32 key length, key, u64 value length, value
// All integers and doubles little-endian; values row-major.
inline constexpr std::uint32_t kCheckpointVersion = 1;

void WriteCheckpoint(const ParamStore& params, std::ostream& out);
ParamStore ReadCheckpoint(std::istream& in, const std::string& source = {});
void SaveCheckpoint(const ParamStore& params,
                    const std::filesystem::path& path);
ParamStore LoadCheckpoint(const std::filesystem::path& path);
std::string CheckpointBytes(const ParamStore& params);

}  // namespace wclner

#endif  // WCLNER_NUMCORE_PARAM_STORE_HPP_
