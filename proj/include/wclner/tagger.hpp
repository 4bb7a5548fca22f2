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
#ifndef WCLNER_TAGGER_HPP_
#define WCLNER_TAGGER_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "wclner/corpus.hpp"
#include "wclner/encoder.hpp"
#include "wclner/numcore/param_store.hpp"
#include "wclner/numcore/tensor.hpp"

// BiLSTM features over encoder outputs, scored by a linear-chain CRF.
namespace wclner {

// Gate blocks are laid out [input | forget | cell | output] along the 4h axis.
struct LstmCellParams {
  Tensor input_weights;      // [in, 4h]
  Tensor recurrent_weights;  // [h, 4h]
  Tensor bias;               // [4h]
};

struct BiLstmParams {
  LstmCellParams forward;
  LstmCellParams backward;

  Index input_dim() const { return forward.input_weights.shape().rows(); }
  Index hidden_dim() const { return forward.recurrent_weights.shape().rows(); }

  static BiLstmParams Create(ParamStore& store, Index input_dim,
                             Index hidden_dim, std::mt19937_64& rng,
                             const std::string& prefix = "bilstm.");
  static BiLstmParams Bind(const ParamStore& store,
                           const std::string& prefix = "bilstm.");
};

// [T, d] -> [T, 2h]; row t is [forward state t | backward state t].
Tensor bilstm_forward(const BiLstmParams& params, const Tensor& inputs);

// ---- CRF ------------------------------------------------------------------
//
// Tags are 0..K-1. The transition matrix is (K+2) x (K+2) with a virtual
// START state at index K and STOP at K+1; A(i, j) scores moving from i to j.
// Row STOP and column START are never read.

inline Index CrfStart(Index num_tags) { return num_tags; }
inline Index CrfStop(Index num_tags) { return num_tags + 1; }

struct TagPath {
  std::vector<Index> tags;
  double score = 0.0;
};

double crf_path_score(const Matrix& emissions, const Matrix& transitions,
                      std::span<const Index> path);
double crf_log_partition(const Matrix& emissions, const Matrix& transitions);
// Highest-scoring path; ties go to the smallest tag id at every backtrack.
TagPath viterbi(const Matrix& emissions, const Matrix& transitions);

// logZ - score(gold), differentiable in both emissions [T, K] and the
// transition matrix. `penalty`, when non-empty, is a constant added to the
// transitions (used to forbid BIO-illegal moves).
Tensor crf_nll(const Tensor& emissions, const Tensor& transitions,
               std::span<const Index> gold, const Matrix& penalty = {});

// Score added to every transition that breaks BIO: anything into I-X other
// than from B-X or I-X, including START -> I-X.
inline constexpr double kIllegalTransition = -1e4;
Matrix BioTransitionPenalty(const TagSet& tags);

struct CrfParams {
  Tensor transitions;         // [K+2, K+2]
  Tensor emission_weights;    // [2h, K]
  Tensor emission_bias;       // [K]

  Index num_tags() const { return emission_bias.shape().cols(); }

  static CrfParams Create(ParamStore& store, Index feature_dim, Index num_tags,
                          std::mt19937_64& rng,
                          const std::string& prefix = "crf.");
  static CrfParams Bind(const ParamStore& store,
                        const std::string& prefix = "crf.");
};

// ---- Model ----------------------------------------------------------------

struct TaggerConfig {
  Index hidden_dim = 64;
  // Forbid BIO-illegal transitions during training and decoding.
  bool strict = false;
};

// Encoder, BiLSTM and CRF parameters in one store together with the
// vocabulary and tag set needed to run them.
class NerModel {
 public:
  NerModel() = default;

  // Adds fresh BiLSTM and CRF parameters on top of `encoder` (which must hold
  // "encoder.*" parameters sized for `vocab`).
  static NerModel Create(const ParamStore& encoder, Vocab vocab, TagSet tags,
                         const TaggerConfig& config, std::mt19937_64& rng);

  // Rebuilds a model from checkpoint contents.
  static NerModel FromStore(ParamStore store);
  static NerModel Load(const std::filesystem::path& path);
  // Store with the vocabulary, tag set and config written into its metadata.
  const ParamStore& store() const { return store_; }
  ParamStore& mutable_store() { return store_; }
  void Save(const std::filesystem::path& path) const;

  const Vocab& vocab() const { return vocab_; }
  const TagSet& tags() const { return tags_; }
  bool strict() const { return strict_; }
  const Matrix& penalty() const { return penalty_; }

  // Adds unseen tokens of `sentences` with fresh embedding rows.
  std::size_t ExtendVocabulary(std::span<const TaggedSentence> sentences,
                               std::mt19937_64& rng);

  Tensor Emissions(std::span<const std::string> tokens) const;
  Tensor Loss(const TaggedSentence& sentence) const;
  TagPath Decode(std::span<const std::string> tokens) const;
  std::vector<std::string> Predict(std::span<const std::string> tokens) const;

 private:
  void SyncMeta();

  ParamStore store_;
  Vocab vocab_;
  TagSet tags_;
  bool strict_ = false;
  Matrix penalty_;
};

struct NerConfig {
  int epochs = 10;
  double lr = 0.05;
  std::uint64_t seed = 1;
  // Also update the encoder parameters.
  bool train_encoder = true;

  void Validate() const;
};

struct NerReport {
  std::vector<double> epoch_mean_loss;
  std::size_t steps = 0;
};

// Called after every step with (epoch, sentence index, loss).
using NerStepHook = std::function<void(int, std::size_t, double)>;

// One sentence per step in a seeded shuffled order.
NerReport train_ner(std::span<const TaggedSentence> corpus, NerModel& model,
                    const NerConfig& config, const NerStepHook& hook = {});

// Mean CRF negative log-likelihood; no parameters change.
double MeanLoss(std::span<const TaggedSentence> corpus, const NerModel& model);

// Same tokens, predicted BIO tags.
std::vector<TaggedSentence> predict(std::span<const TaggedSentence> corpus,
                                    const NerModel& model);

}  // namespace wclner

#endif  // WCLNER_TAGGER_HPP_
