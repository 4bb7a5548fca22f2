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
#include "wclner/tagger.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "wclner/error.hpp"
#include "wclner/numcore/kernels.hpp"
#include "wclner/numcore/ops.hpp"

namespace wclner {

namespace {

LstmCellParams CreateLstmCell(ParamStore& store, const std::string& prefix,
                              Index in, Index hidden, std::mt19937_64& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  LstmCellParams c;
  c.input_weights = store.CreateUniform(prefix + "w_in",
                                        Shape::Mat(in, 4 * hidden), scale, rng);
  c.recurrent_weights = store.CreateUniform(
      prefix + "w_rec", Shape::Mat(hidden, 4 * hidden), scale, rng);
  c.bias = store.CreateZeros(prefix + "bias", Shape::Vector(4 * hidden));
  return c;
}

LstmCellParams BindLstmCell(const ParamStore& store, const std::string& prefix) {
  LstmCellParams c{store.at(prefix + "w_in"), store.at(prefix + "w_rec"),
                   store.at(prefix + "bias")};
  const Index h = c.recurrent_weights.shape().rows();
  if (c.recurrent_weights.shape() != Shape::Mat(h, 4 * h) ||
      c.input_weights.shape().rank() != 2 ||
      c.input_weights.shape().cols() != 4 * h ||
      c.bias.shape() != Shape::Vector(4 * h)) {
    throw ShapeError("LSTM parameters under " + prefix +
                     " have inconsistent shapes");
  }
  return c;
}

Tensor RunLstm(const LstmCellParams& cell, const Tensor& inputs, bool reverse) {
  const Index steps = inputs.shape().rows();
  const Index h = cell.recurrent_weights.shape().rows();
  Tensor projected = add(matmul(inputs, cell.input_weights), cell.bias);
  std::vector<Tensor> states(static_cast<std::size_t>(steps));
  Tensor hidden;
  Tensor memory;
  for (Index k = 0; k < steps; ++k) {
    const Index t = reverse ? steps - 1 - k : k;
    Tensor pre = row(projected, t);
    if (hidden.defined()) pre = add(pre, matmul(hidden, cell.recurrent_weights));
    Tensor in_gate = sigmoid(slice(pre, 0, h));
    Tensor forget_gate = sigmoid(slice(pre, h, h));
    Tensor candidate = tanh(slice(pre, 2 * h, h));
    Tensor out_gate = sigmoid(slice(pre, 3 * h, h));
    memory = memory.defined()
                 ? add(mul(forget_gate, memory), mul(in_gate, candidate))
                 : mul(in_gate, candidate);
    hidden = mul(out_gate, tanh(memory));
    states[static_cast<std::size_t>(t)] = hidden;
  }
  return stack_rows(states);
}

void CheckCrfShapes(const Matrix& emissions, const Matrix& transitions) {
  const Index k = emissions.cols();
  if (emissions.rows() < 1 || k < 1) {
    throw ShapeError("crf: emissions need at least one step and one tag");
  }
  if (transitions.rows() != k + 2 || transitions.cols() != k + 2) {
    throw ShapeError("crf: transitions must be [" + std::to_string(k + 2) +
                     ", " + std::to_string(k + 2) + "] for " +
                     std::to_string(k) + " tags, got [" +
                     std::to_string(transitions.rows()) + ", " +
                     std::to_string(transitions.cols()) + "]");
  }
}

void CheckPath(std::span<const Index> path, Index steps, Index num_tags) {
  if (static_cast<Index>(path.size()) != steps) {
    throw ShapeError("crf: path has " + std::to_string(path.size()) +
                     " tags for " + std::to_string(steps) + " steps");
  }
  for (Index tag : path) {
    if (tag < 0 || tag >= num_tags) {
      throw ShapeError("crf: tag id " + std::to_string(tag) +
                       " outside [0, " + std::to_string(num_tags) + ")");
    }
  }
}

// alpha(t, j): log-sum of every prefix ending in tag j at step t.
Matrix ForwardScores(const Matrix& e, const Matrix& a) {
  const Index steps = e.rows();
  const Index k = e.cols();
  Matrix alpha(steps, k);
  alpha.row(0) = a.row(CrfStart(k)).head(k) + e.row(0);
  for (Index t = 1; t < steps; ++t) {
    for (Index j = 0; j < k; ++j) {
      alpha(t, j) =
          LogSumExp(alpha.row(t - 1).transpose() + a.col(j).head(k)) + e(t, j);
    }
  }
  return alpha;
}

// beta(t, i): log-sum of every suffix after step t given tag i at t,
// including the STOP transition.
Matrix BackwardScores(const Matrix& e, const Matrix& a) {
  const Index steps = e.rows();
  const Index k = e.cols();
  Matrix beta(steps, k);
  beta.row(steps - 1) = a.col(CrfStop(k)).head(k).transpose();
  for (Index t = steps - 2; t >= 0; --t) {
    const RowVector next = e.row(t + 1) + beta.row(t + 1);
    for (Index i = 0; i < k; ++i) {
      beta(t, i) = LogSumExp(a.row(i).head(k) + next);
    }
  }
  return beta;
}

double FinalLogZ(const Matrix& alpha, const Matrix& a) {
  const Index k = alpha.cols();
  return LogSumExp(alpha.row(alpha.rows() - 1) +
                   a.col(CrfStop(k)).head(k).transpose());
}

bool IsInside(const std::string& label) {
  return label.size() > 2 && label[0] == 'I';
}

}  // namespace

BiLstmParams BiLstmParams::Create(ParamStore& store, Index input_dim,
                                  Index hidden_dim, std::mt19937_64& rng,
                                  const std::string& prefix) {
  if (input_dim <= 0 || hidden_dim <= 0) {
    throw ConfigError("BiLSTM dimensions must be positive");
  }
  BiLstmParams p;
  p.forward = CreateLstmCell(store, prefix + "fwd.", input_dim, hidden_dim, rng);
  p.backward = CreateLstmCell(store, prefix + "bwd.", input_dim, hidden_dim, rng);
  return p;
}

BiLstmParams BiLstmParams::Bind(const ParamStore& store,
                                const std::string& prefix) {
  BiLstmParams p;
  p.forward = BindLstmCell(store, prefix + "fwd.");
  p.backward = BindLstmCell(store, prefix + "bwd.");
  if (p.forward.input_weights.shape() != p.backward.input_weights.shape()) {
    throw ShapeError("BiLSTM directions have different shapes");
  }
  return p;
}

Tensor bilstm_forward(const BiLstmParams& params, const Tensor& inputs) {
  if (inputs.shape().rank() != 2 || inputs.shape().cols() != params.input_dim()) {
    throw ShapeError("bilstm_forward: expected [T, " +
                     std::to_string(params.input_dim()) + "] inputs, got " +
                     inputs.shape().ToString());
  }
  std::vector<Tensor> halves{RunLstm(params.forward, inputs, false),
                             RunLstm(params.backward, inputs, true)};
  return concat(halves, 1);
}

double crf_path_score(const Matrix& emissions, const Matrix& transitions,
                      std::span<const Index> path) {
  CheckCrfShapes(emissions, transitions);
  const Index k = emissions.cols();
  CheckPath(path, emissions.rows(), k);
  double s = transitions(CrfStart(k), path[0]);
  for (std::size_t t = 0; t < path.size(); ++t) {
    s += emissions(static_cast<Index>(t), path[t]);
    if (t > 0) s += transitions(path[t - 1], path[t]);
  }
  return s + transitions(path.back(), CrfStop(k));
}

double crf_log_partition(const Matrix& emissions, const Matrix& transitions) {
  CheckCrfShapes(emissions, transitions);
  return FinalLogZ(ForwardScores(emissions, transitions), transitions);
}

TagPath viterbi(const Matrix& emissions, const Matrix& transitions) {
  CheckCrfShapes(emissions, transitions);
  const Index steps = emissions.rows();
  const Index k = emissions.cols();
  Matrix delta(steps, k);
  Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> back(
      steps, k);
  delta.row(0) = transitions.row(CrfStart(k)).head(k) + emissions.row(0);
  for (Index t = 1; t < steps; ++t) {
    for (Index j = 0; j < k; ++j) {
      Index best = 0;
      double best_score = delta(t - 1, 0) + transitions(0, j);
      for (Index i = 1; i < k; ++i) {
        const double s = delta(t - 1, i) + transitions(i, j);
        if (s > best_score) {
          best_score = s;
          best = i;
        }
      }
      delta(t, j) = best_score + emissions(t, j);
      back(t, j) = best;
    }
  }
  TagPath path;
  path.tags.resize(static_cast<std::size_t>(steps));
  Index last = 0;
  double best_score = delta(steps - 1, 0) + transitions(0, CrfStop(k));
  for (Index j = 1; j < k; ++j) {
    const double s = delta(steps - 1, j) + transitions(j, CrfStop(k));
    if (s > best_score) {
      best_score = s;
      last = j;
    }
  }
  path.score = best_score;
  path.tags.back() = last;
  for (Index t = steps - 1; t > 0; --t) {
    path.tags[static_cast<std::size_t>(t - 1)] =
        back(t, path.tags[static_cast<std::size_t>(t)]);
  }
  return path;
}

Tensor crf_nll(const Tensor& emissions, const Tensor& transitions,
               std::span<const Index> gold, const Matrix& penalty) {
  if (emissions.shape().rank() == 0) {
    throw ShapeError("crf_nll: emissions must be [T, K], got " +
                     emissions.shape().ToString());
  }
  const Matrix& e = emissions.value();
  Matrix a = transitions.value();
  CheckCrfShapes(e, a);
  if (penalty.size() != 0) {
    if (penalty.rows() != a.rows() || penalty.cols() != a.cols()) {
      throw ShapeError("crf_nll: penalty does not match the transitions");
    }
    a += penalty;
  }
  const Index steps = e.rows();
  const Index k = e.cols();
  CheckPath(gold, steps, k);

  const Matrix alpha = ForwardScores(e, a);
  const Matrix beta = BackwardScores(e, a);
  const double log_z = FinalLogZ(alpha, a);
  const double loss = log_z - crf_path_score(e, a, gold);

  // Expected counts minus gold counts.
  Matrix grad_e = ((alpha + beta).array() - log_z).exp().matrix();
  Matrix grad_a = Matrix::Zero(k + 2, k + 2);
  grad_a.row(CrfStart(k)).head(k) = grad_e.row(0);
  grad_a.col(CrfStop(k)).head(k) = grad_e.row(steps - 1).transpose();
  for (Index t = 1; t < steps; ++t) {
    for (Index i = 0; i < k; ++i) {
      for (Index j = 0; j < k; ++j) {
        grad_a(i, j) += std::exp(alpha(t - 1, i) + a(i, j) + e(t, j) +
                                 beta(t, j) - log_z);
      }
    }
  }
  for (Index t = 0; t < steps; ++t) {
    grad_e(t, gold[static_cast<std::size_t>(t)]) -= 1.0;
    if (t > 0) grad_a(gold[t - 1], gold[t]) -= 1.0;
  }
  grad_a(CrfStart(k), gold.front()) -= 1.0;
  grad_a(gold.back(), CrfStop(k)) -= 1.0;

  const std::vector<Tensor> inputs{emissions, transitions};
  return Tape::Current().Record(
      Shape::Scalar(), Matrix::Constant(1, 1, loss), inputs,
      [ge = std::move(grad_e), ga = std::move(grad_a)](
          const Matrix& g, std::span<detail::Node* const> in) {
        if (in[0]->requires_grad) in[0]->AccumulateGrad(ge * g(0, 0));
        if (in[1]->requires_grad) in[1]->AccumulateGrad(ga * g(0, 0));
      });
}

Matrix BioTransitionPenalty(const TagSet& tags) {
  const Index k = static_cast<Index>(tags.num_labels());
  Matrix p = Matrix::Zero(k + 2, k + 2);
  for (Index j = 0; j < k; ++j) {
    const std::string& to = tags.Label(static_cast<int>(j));
    if (!IsInside(to)) continue;
    const std::string type = to.substr(2);
    p(CrfStart(k), j) = kIllegalTransition;
    for (Index i = 0; i < k; ++i) {
      const std::string& from = tags.Label(static_cast<int>(i));
      const bool continues = from.size() > 2 && from.substr(2) == type;
      if (!continues) p(i, j) = kIllegalTransition;
    }
  }
  return p;
}

CrfParams CrfParams::Create(ParamStore& store, Index feature_dim,
                            Index num_tags, std::mt19937_64& rng,
                            const std::string& prefix) {
  if (feature_dim <= 0 || num_tags <= 0) {
    throw ConfigError("CRF dimensions must be positive");
  }
  const double scale = 1.0 / std::sqrt(static_cast<double>(feature_dim));
  CrfParams p;
  p.transitions = store.CreateZeros(prefix + "transitions",
                                    Shape::Mat(num_tags + 2, num_tags + 2));
  p.emission_weights = store.CreateUniform(
      prefix + "emission_weights", Shape::Mat(feature_dim, num_tags), scale,
      rng);
  p.emission_bias =
      store.CreateZeros(prefix + "emission_bias", Shape::Vector(num_tags));
  return p;
}

CrfParams CrfParams::Bind(const ParamStore& store, const std::string& prefix) {
  CrfParams p{store.at(prefix + "transitions"),
              store.at(prefix + "emission_weights"),
              store.at(prefix + "emission_bias")};
  const Index k = p.num_tags();
  if (p.transitions.shape() != Shape::Mat(k + 2, k + 2) ||
      p.emission_weights.shape().rank() != 2 ||
      p.emission_weights.shape().cols() != k) {
    throw ShapeError("CRF parameters have inconsistent shapes");
  }
  return p;
}

namespace {

constexpr const char* kTagsMetaKey = "tags";
constexpr const char* kStrictMetaKey = "tagger.strict";

}  // namespace

NerModel NerModel::Create(const ParamStore& encoder, Vocab vocab, TagSet tags,
                          const TaggerConfig& config, std::mt19937_64& rng) {
  if (tags.num_types() == 0) throw ConfigError("tag set is empty");
  NerModel m;
  ParamStore enc_only;
  encoder.ExtractPrefix("encoder.", enc_only);
  m.store_ = enc_only.Clone();
  m.store_.SetRequiresGrad(true);
  for (const auto& [k, v] : encoder.meta()) {
    if (k.rfind("encoder.", 0) == 0) m.store_.meta()[k] = v;
  }
  const EncoderParams enc = EncoderParams::Bind(m.store_);
  if (enc.embedding.shape().rows() != vocab.size()) {
    throw ShapeError("encoder embedding has " +
                     std::to_string(enc.embedding.shape().rows()) +
                     " rows for a vocabulary of " +
                     std::to_string(vocab.size()));
  }
  const BiLstmParams lstm = BiLstmParams::Create(
      m.store_, enc.output_dim(), config.hidden_dim, rng);
  CrfParams::Create(m.store_, 2 * lstm.hidden_dim(),
                    static_cast<Index>(tags.num_labels()), rng);
  m.vocab_ = std::move(vocab);
  m.tags_ = std::move(tags);
  m.strict_ = config.strict;
  m.penalty_ = BioTransitionPenalty(m.tags_);
  m.SyncMeta();
  return m;
}

void NerModel::SyncMeta() {
  store_.meta()[kVocabMetaKey] = vocab_.Serialize();
  store_.meta()[kTagsMetaKey] = tags_.Serialize();
  store_.meta()[kStrictMetaKey] = strict_ ? "1" : "0";
}

NerModel NerModel::FromStore(ParamStore store) {
  NerModel m;
  const auto& meta = store.meta();
  for (const char* key : {kVocabMetaKey, kTagsMetaKey}) {
    if (!meta.count(key)) {
      throw DataError(std::string("model checkpoint lacks '") + key +
                      "' metadata");
    }
  }
  std::istringstream vocab_in(meta.at(kVocabMetaKey));
  m.vocab_ = Vocab::Parse(vocab_in, "checkpoint vocab");
  std::istringstream tags_in(meta.at(kTagsMetaKey));
  m.tags_ = TagSet::Parse(tags_in, "checkpoint tags");
  auto strict = meta.find(kStrictMetaKey);
  m.strict_ = strict != meta.end() && strict->second == "1";
  m.store_ = std::move(store);
  m.store_.SetRequiresGrad(true);
  m.penalty_ = BioTransitionPenalty(m.tags_);

  const EncoderParams enc = EncoderParams::Bind(m.store_);
  const BiLstmParams lstm = BiLstmParams::Bind(m.store_);
  const CrfParams crf = CrfParams::Bind(m.store_);
  if (enc.embedding.shape().rows() != m.vocab_.size() ||
      lstm.input_dim() != enc.output_dim() ||
      crf.emission_weights.shape().rows() != 2 * lstm.hidden_dim() ||
      crf.num_tags() != static_cast<Index>(m.tags_.num_labels())) {
    throw DataError("model checkpoint has inconsistent dimensions");
  }
  return m;
}

NerModel NerModel::Load(const std::filesystem::path& path) {
  return FromStore(LoadCheckpoint(path));
}

void NerModel::Save(const std::filesystem::path& path) const {
  SaveCheckpoint(store_, path);
}

std::size_t NerModel::ExtendVocabulary(std::span<const TaggedSentence> sentences,
                                       std::mt19937_64& rng) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(sentences.size());
  for (const TaggedSentence& s : sentences) tokens.push_back(s.tokens);
  const std::size_t added = wclner::ExtendVocabulary(store_, vocab_, tokens, rng);
  store_.at("encoder.embedding").set_requires_grad(true);
  SyncMeta();
  return added;
}

Tensor NerModel::Emissions(std::span<const std::string> tokens) const {
  const EncoderParams enc = EncoderParams::Bind(store_);
  const BiLstmParams lstm = BiLstmParams::Bind(store_);
  const CrfParams crf = CrfParams::Bind(store_);
  Tensor features = bilstm_forward(lstm, encode(enc, vocab_, tokens));
  return add(matmul(features, crf.emission_weights), crf.emission_bias);
}

Tensor NerModel::Loss(const TaggedSentence& sentence) const {
  std::vector<Index> gold;
  gold.reserve(sentence.size());
  for (const std::string& tag : sentence.tags) {
    auto id = tags_.LabelId(tag);
    if (!id) throw DataError("tag '" + tag + "' is not in the model tag set");
    gold.push_back(*id);
  }
  const CrfParams crf = CrfParams::Bind(store_);
  static const Matrix kNoPenalty;
  return crf_nll(Emissions(sentence.tokens), crf.transitions, gold,
                 strict_ ? penalty_ : kNoPenalty);
}

TagPath NerModel::Decode(std::span<const std::string> tokens) const {
  NoGradGuard guard;
  const Matrix e = Emissions(tokens).value();
  Matrix a = CrfParams::Bind(store_).transitions.value();
  if (strict_) a += penalty_;
  return viterbi(e, a);
}

std::vector<std::string> NerModel::Predict(
    std::span<const std::string> tokens) const {
  const TagPath path = Decode(tokens);
  std::vector<std::string> labels;
  labels.reserve(path.tags.size());
  for (Index id : path.tags) labels.push_back(tags_.Label(static_cast<int>(id)));
  return labels;
}

void NerConfig::Validate() const {
  if (epochs < 0) throw ConfigError("--epochs must not be negative");
  if (!(lr > 0.0)) throw ConfigError("--lr must be positive");
}

NerReport train_ner(std::span<const TaggedSentence> corpus, NerModel& model,
                    const NerConfig& config, const NerStepHook& hook) {
  config.Validate();
  if (corpus.empty()) throw ConfigError("train_ner: empty training corpus");
  for (const TaggedSentence& s : corpus) ValidateSentence(s, &model.tags());

  ParamStore& store = model.mutable_store();
  ParamStore trainable;
  ParamStore frozen;
  store.ExtractPrefix("bilstm.", trainable);
  store.ExtractPrefix("crf.", trainable);
  store.ExtractPrefix("encoder.", config.train_encoder ? trainable : frozen);
  frozen.SetRequiresGrad(false);

  std::mt19937_64 rng(config.seed ^ 0x5851f42d4c957f2dULL);
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);

  NerReport report;
  try {
    for (int epoch = 0; epoch < config.epochs; ++epoch) {
      std::shuffle(order.begin(), order.end(), rng);
      double total = 0.0;
      for (std::size_t idx : order) {
        Tape::Current().Clear();
        Tensor loss = model.Loss(corpus[idx]);
        const double value = loss.item();
        if (!std::isfinite(value)) {
          throw NumericError("non-finite CRF loss at sentence " +
                             std::to_string(idx + 1) + ", epoch " +
                             std::to_string(epoch + 1));
        }
        backward(loss);
        try {
          sgd_step(trainable, config.lr);
        } catch (const NumericError& e) {
          throw NumericError(std::string(e.what()) + " (sentence " +
                             std::to_string(idx + 1) + ", epoch " +
                             std::to_string(epoch + 1) + ")");
        }
        total += value;
        ++report.steps;
        if (hook) hook(epoch, idx, value);
      }
      report.epoch_mean_loss.push_back(total /
                                       static_cast<double>(corpus.size()));
    }
  } catch (...) {
    Tape::Current().Clear();
    trainable.ClearGrads();
    frozen.SetRequiresGrad(true);
    throw;
  }
  frozen.SetRequiresGrad(true);
  return report;
}

double MeanLoss(std::span<const TaggedSentence> corpus, const NerModel& model) {
  if (corpus.empty()) return 0.0;
  NoGradGuard guard;
  double total = 0.0;
  for (const TaggedSentence& s : corpus) total += model.Loss(s).item();
  return total / static_cast<double>(corpus.size());
}

std::vector<TaggedSentence> predict(std::span<const TaggedSentence> corpus,
                                    const NerModel& model) {
  std::vector<TaggedSentence> out;
  out.reserve(corpus.size());
  for (const TaggedSentence& s : corpus) {
    if (s.tokens.empty()) throw DataError("cannot tag an empty sentence");
    out.push_back({s.tokens, model.Predict(s.tokens)});
  }
  return out;
}

}  // namespace wclner
