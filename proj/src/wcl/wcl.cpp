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
#include "wclner/wcl.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "wclner/error.hpp"
#include "wclner/numcore/ops.hpp"

namespace wclner {

ProjectionHead ProjectionHead::Create(ParamStore& store, Index input_dim,
                                      Index output_dim, std::mt19937_64& rng,
                                      const std::string& prefix) {
  if (input_dim <= 0 || output_dim <= 0) {
    throw ConfigError("projection head dimensions must be positive");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(input_dim));
  ProjectionHead h;
  h.w1 = store.CreateUniform(prefix + "w1", Shape::Mat(input_dim, input_dim),
                             scale, rng);
  h.b1 = store.CreateZeros(prefix + "b1", Shape::Vector(input_dim));
  h.w2 = store.CreateUniform(prefix + "w2", Shape::Mat(input_dim, output_dim),
                             scale, rng);
  h.b2 = store.CreateZeros(prefix + "b2", Shape::Vector(output_dim));
  return h;
}

ProjectionHead ProjectionHead::Bind(const ParamStore& store,
                                    const std::string& prefix) {
  ProjectionHead h{store.at(prefix + "w1"), store.at(prefix + "b1"),
                   store.at(prefix + "w2"), store.at(prefix + "b2")};
  const Index d = h.w1.shape().rows();
  if (h.w1.shape() != Shape::Mat(d, d) || h.b1.shape() != Shape::Vector(d) ||
      h.w2.shape().rank() != 2 || h.w2.shape().rows() != d ||
      h.b2.shape() != Shape::Vector(h.w2.shape().cols())) {
    throw ShapeError("projection head parameters have inconsistent shapes");
  }
  return h;
}

Tensor project(const ProjectionHead& head, const Tensor& v) {
  if (v.shape() != Shape::Vector(head.input_dim())) {
    throw ShapeError("project: expected input " +
                     Shape::Vector(head.input_dim()).ToString() + ", got " +
                     v.shape().ToString());
  }
  Tensor hidden = relu(add(matmul(v, head.w1), head.b1));
  return add(matmul(hidden, head.w2), head.b2);
}

SimilarityMode ParseSimilarityMode(const std::string& text) {
  if (text == "cosine") return SimilarityMode::kCosine;
  if (text == "dot") return SimilarityMode::kDot;
  throw ConfigError("unknown similarity '" + text + "' (cosine, dot)");
}

Tensor similarity(const Tensor& a, const Tensor& b, SimilarityMode mode) {
  if (mode == SimilarityMode::kDot) return dot(a, b);
  return dot(normalize(a), normalize(b));
}

NegativeQueue::NegativeQueue(std::size_t capacity, Index dim,
                             std::mt19937_64& rng) {
  if (capacity == 0 || dim <= 0) {
    throw ConfigError("negative queue needs positive capacity and dimension");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  rows_.resize(static_cast<Index>(capacity), dim);
  for (Index r = 0; r < rows_.rows(); ++r) {
    for (Index c = 0; c < dim; ++c) rows_(r, c) = normal(rng);
  }
}

RowVector NegativeQueue::at(std::size_t i) const {
  if (i >= capacity()) throw ShapeError("negative queue index out of range");
  return rows_.row(static_cast<Index>((eldest_ + i) % capacity()));
}

Matrix NegativeQueue::Ordered() const {
  Matrix out(rows_.rows(), rows_.cols());
  for (std::size_t i = 0; i < capacity(); ++i) {
    out.row(static_cast<Index>(i)) = at(i);
  }
  return out;
}

void NegativeQueue::EnqueueDequeue(const RowVector& key) {
  if (!initialized()) throw ShapeError("negative queue is not initialized");
  if (key.cols() != dim()) {
    throw ShapeError("negative queue holds dim " + std::to_string(dim()) +
                     ", got " + std::to_string(key.cols()));
  }
  // The eldest slot becomes the newest.
  rows_.row(static_cast<Index>(eldest_)) = key;
  eldest_ = (eldest_ + 1) % capacity();
}

Tensor build_msim(const Tensor& pos, const NegativeQueue& queue,
                  const Tensor& anchor, SimilarityMode mode) {
  if (!queue.initialized()) throw ShapeError("build_msim: queue not initialized");
  if (pos.shape().rank() != 0) {
    throw ShapeError("build_msim: positive must be a scalar, got " +
                     pos.shape().ToString());
  }
  if (anchor.shape() != Shape::Vector(queue.dim())) {
    throw ShapeError("build_msim: anchor " + anchor.shape().ToString() +
                     " does not match queue dim " +
                     std::to_string(queue.dim()));
  }
  Matrix keys = queue.Ordered();
  Tensor a = anchor;
  if (mode == SimilarityMode::kCosine) {
    for (Index r = 0; r < keys.rows(); ++r) {
      const double n = keys.row(r).norm();
      if (n <= kNormalizeEpsilon) {
        keys.row(r).setZero();
      } else {
        keys.row(r) /= n;
      }
    }
    a = normalize(anchor);
  }
  Tensor negatives = matmul(Tensor::FromMatrix(keys), a);
  const std::vector<Tensor> parts{pos, negatives};
  return concat(parts, 0);
}

Tensor info_nce(const Tensor& msim, double tau) {
  if (!(tau > 0.0)) {
    std::ostringstream msg;
    msg << "temperature must be positive, got " << tau;
    throw ConfigError(msg.str());
  }
  if (msim.shape().rank() != 1) {
    throw ShapeError("info_nce: expected a vector, got " +
                     msim.shape().ToString());
  }
  Tensor scaled = scale(msim, 1.0 / tau);
  return sub(logsumexp(scaled), element(scaled, 0));
}

void WclConfig::Validate() const {
  if (!(tau > 0.0)) throw ConfigError("--tau must be positive");
  if (queue_size < 1) throw ConfigError("--queue must be at least 1");
  if (epochs < 1) throw ConfigError("--epochs must be at least 1");
  if (!(lr > 0.0)) throw ConfigError("--lr must be positive");
}

WclModel WclModel::Create(std::span<const SentencePair> pairs,
                          std::span<const std::vector<std::string>> extra_sentences,
                          Index num_entity_types, const EncoderConfig& encoder,
                          const WclConfig& config) {
  config.Validate();
  std::vector<std::vector<std::string>> sentences;
  for (const SentencePair& p : pairs) {
    sentences.push_back(p.original);
    sentences.push_back(p.back_translation);
  }
  sentences.insert(sentences.end(), extra_sentences.begin(),
                   extra_sentences.end());

  WclModel m;
  m.vocab = Vocab::Build(sentences);
  std::mt19937_64 rng(config.seed);
  EncoderParams enc =
      EncoderParams::Create(m.query, m.vocab.size(), encoder, rng);
  ProjectionHead::Create(m.query, enc.output_dim(), num_entity_types, rng);
  m.key = init_key_from_query(m.query);
  ParamStore key_head = init_key_from_query(m.query, "head.");
  for (const auto& [name, t] : key_head.params()) m.key.Set(name, t);
  m.queue = NegativeQueue(config.queue_size, num_entity_types, rng);
  m.query.meta()[kVocabMetaKey] = m.vocab.Serialize();
  return m;
}

namespace {

Tensor Embed(const ParamStore& encoder_store, const ProjectionHead& head,
             const Vocab& vocab, std::span<const std::string> tokens,
             SimilarityMode mode) {
  EncoderParams enc = EncoderParams::Bind(encoder_store);
  Tensor v = project(head, pool(encode(enc, vocab, tokens)));
  return mode == SimilarityMode::kCosine ? normalize(v) : v;
}

}  // namespace

Tensor WclModel::QueryVector(std::span<const std::string> tokens,
                             SimilarityMode mode) const {
  return Embed(query, ProjectionHead::Bind(query), vocab, tokens, mode);
}

RowVector WclModel::KeyVector(std::span<const std::string> tokens,
                              SimilarityMode mode) const {
  NoGradGuard guard;
  return Embed(key, ProjectionHead::Bind(key), vocab, tokens, mode)
      .row_value();
}

WclReport train_wcl(std::span<const SentencePair> pairs, WclModel& model,
                    const WclConfig& config, const WclStepHook& hook) {
  config.Validate();
  if (pairs.empty()) throw ConfigError("train_wcl: no sentence pairs");
  if (!model.queue.initialized()) {
    throw ConfigError("train_wcl: negative queue is not initialized");
  }
  const ProjectionHead head = ProjectionHead::Bind(model.query);
  if (head.output_dim() != model.queue.dim()) {
    throw ShapeError("projection head emits " +
                     std::to_string(head.output_dim()) +
                     " dims but the queue holds " +
                     std::to_string(model.queue.dim()));
  }

  // Only encoder and head parameters are trained; anything else in the store
  // is left alone.
  ParamStore trainable;
  model.query.ExtractPrefix("encoder.", trainable);
  model.query.ExtractPrefix("head.", trainable);

  std::mt19937_64 rng(config.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);

  WclReport report;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t idx : order) {
      const SentencePair& pair = pairs[idx];
      Tape::Current().Clear();
      const RowVector key = model.KeyVector(pair.back_translation,
                                            config.similarity);
      Tensor eq = model.QueryVector(pair.original, config.similarity);
      Tensor ek = Tensor::FromRow(key);
      // Both sides are already normalized in cosine mode.
      Tensor pos = dot(eq, ek);
      Tensor loss = info_nce(
          build_msim(pos, model.queue, eq, config.similarity), config.tau);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        Tape::Current().Clear();
        trainable.ClearGrads();
        throw NumericError("non-finite contrastive loss at pair " +
                           std::to_string(pair.index) + " (line " +
                           std::to_string(idx + 1) + "), epoch " +
                           std::to_string(epoch + 1));
      }
      backward(loss);
      sgd_step(trainable, config.lr);
      model.queue.EnqueueDequeue(key);
      update_key(model.key, model.query, config.key_update);
      total += value;
      ++report.steps;
      if (hook) hook(epoch, idx, value);
    }
    report.epoch_mean_loss.push_back(total / static_cast<double>(pairs.size()));
  }
  return report;
}

Separation MeasureSeparation(std::span<const SentencePair> pairs,
                             const WclModel& model, SimilarityMode mode) {
  NoGradGuard guard;
  Separation s;
  if (pairs.empty()) return s;
  Matrix keys = model.queue.Ordered();
  if (mode == SimilarityMode::kCosine) keys.rowwise().normalize();
  for (const SentencePair& p : pairs) {
    const RowVector q = model.QueryVector(p.original, mode).row_value();
    const RowVector k = model.KeyVector(p.back_translation, mode);
    s.positive += q.dot(k);
    s.negative += (keys * q.transpose()).mean();
  }
  s.positive /= static_cast<double>(pairs.size());
  s.negative /= static_cast<double>(pairs.size());
  return s;
}

}  // namespace wclner
