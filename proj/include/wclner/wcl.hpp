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
#ifndef WCLNER_WCL_HPP_
#define WCLNER_WCL_HPP_

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wclner/corpus.hpp"
#include "wclner/encoder.hpp"
#include "wclner/numcore/param_store.hpp"
#include "wclner/numcore/tensor.hpp"

// Contrastive fine-tuning of the token encoder against a queue of negatives.
namespace wclner {

// Two-layer MLP: out = W2 relu(W1 v + b1) + b2, with vectors acting as rows.
struct ProjectionHead {
  Tensor w1;  // [d, d]
  Tensor b1;  // [d]
  Tensor w2;  // [d, C]
  Tensor b2;  // [C]

  Index input_dim() const { return w1.shape().rows(); }
  Index output_dim() const { return w2.shape().cols(); }

  static ProjectionHead Create(ParamStore& store, Index input_dim,
                               Index output_dim, std::mt19937_64& rng,
                               const std::string& prefix = "head.");
  static ProjectionHead Bind(const ParamStore& store,
                             const std::string& prefix = "head.");
};

Tensor project(const ProjectionHead& head, const Tensor& v);

enum class SimilarityMode {
  kCosine,  // dot product of L2-normalized vectors
  kDot,     // raw dot product, no normalization anywhere
};

SimilarityMode ParseSimilarityMode(const std::string& text);

// Cosine similarity in [-1, 1]; zero vectors give 0.
Tensor similarity(const Tensor& a, const Tensor& b,
                  SimilarityMode mode = SimilarityMode::kCosine);

// Fixed-size FIFO of projected key vectors, standard-normal initialized.
class NegativeQueue {
 public:
  NegativeQueue() = default;
  NegativeQueue(std::size_t capacity, Index dim, std::mt19937_64& rng);

  bool initialized() const { return capacity() > 0; }
  std::size_t capacity() const { return static_cast<std::size_t>(rows_.rows()); }
  std::size_t size() const { return capacity(); }
  Index dim() const { return rows_.cols(); }

  // i = 0 is the eldest entry.
  RowVector at(std::size_t i) const;
  // Entries in FIFO order, eldest first.
  Matrix Ordered() const;

  // Drops the eldest entry and appends `key`.
  void EnqueueDequeue(const RowVector& key);

 private:
  Matrix rows_;
  std::size_t eldest_ = 0;
};

// [pos, sim(anchor, q_0), ..., sim(anchor, q_{N-2})] with queue entries in
// FIFO order. Queue entries are constants.
Tensor build_msim(const Tensor& pos, const NegativeQueue& queue,
                  const Tensor& anchor,
                  SimilarityMode mode = SimilarityMode::kCosine);

// -log softmax(m / tau)[0], evaluated through logsumexp.
Tensor info_nce(const Tensor& msim, double tau);

struct WclConfig {
  double tau = 0.07;
  std::size_t queue_size = 4096;  // N - 1
  int epochs = 10;
  double lr = 0.05;
  std::uint64_t seed = 1;
  KeyUpdate key_update;
  SimilarityMode similarity = SimilarityMode::kCosine;

  void Validate() const;
};

struct WclReport {
  std::vector<double> epoch_mean_loss;
  std::size_t steps = 0;
};

// Query side: encoder parameters under "encoder." and the head under "head."
// of one store, both updated by gradient descent. Key side: a copy of both,
// never differentiated and maintained by the key-update mode. With "mirror"
// the key head always equals the query head, i.e. a single shared head.
struct WclModel {
  ParamStore query;
  ParamStore key;
  Vocab vocab;
  NegativeQueue queue;

  // Builds a fresh model: vocabulary over both sides of `pairs` (plus
  // `extra_sentences`), random encoder and head, key copied from query,
  // queue of `config.queue_size` standard-normal vectors of dim
  // `num_entity_types`.
  static WclModel Create(std::span<const SentencePair> pairs,
                         std::span<const std::vector<std::string>> extra_sentences,
                         Index num_entity_types, const EncoderConfig& encoder,
                         const WclConfig& config);

  // Projected (and, in cosine mode, normalized) query/key vectors.
  Tensor QueryVector(std::span<const std::string> tokens,
                     SimilarityMode mode) const;
  RowVector KeyVector(std::span<const std::string> tokens,
                      SimilarityMode mode) const;
};

// Called after every step with (epoch, pair index, loss).
using WclStepHook = std::function<void(int, std::size_t, double)>;

WclReport train_wcl(std::span<const SentencePair> pairs, WclModel& model,
                    const WclConfig& config, const WclStepHook& hook = {});

// Mean similarity of positive (query, key) pairs and of query against the
// queue, under the current parameters.
struct Separation {
  double positive = 0.0;
  double negative = 0.0;
};

Separation MeasureSeparation(std::span<const SentencePair> pairs,
                             const WclModel& model, SimilarityMode mode);

}  // namespace wclner

#endif  // WCLNER_WCL_HPP_
