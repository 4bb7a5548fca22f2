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
#ifndef WCLNER_ENCODER_HPP_
#define WCLNER_ENCODER_HPP_

#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wclner/numcore/param_store.hpp"
#include "wclner/numcore/tensor.hpp"

namespace wclner {

// Token <-> id map with reserved padding and unknown ids.
class Vocab {
 public:
  static constexpr Index kPad = 0;
  static constexpr Index kUnknown = 1;
  static constexpr Index kReserved = 2;

  Vocab() = default;

  // Case-preserving vocabulary over every token with count >= min_count, in
  // order of first occurrence.
  static Vocab Build(std::span<const std::vector<std::string>> sentences,
                     std::size_t min_count = 1);

  // Returns the id of `token`, adding it when new.
  Index Add(const std::string& token);
  // Id of `token`, or kUnknown.
  Index Id(const std::string& token) const;
  bool contains(const std::string& token) const;
  const std::string& Token(Index id) const;
  // Number of ids, reserved ones included.
  Index size() const { return kReserved + static_cast<Index>(tokens_.size()); }

  std::vector<Index> Encode(std::span<const std::string> tokens) const;

  // One token per line; line n (0-based) holds id n + kReserved.
  std::string Serialize() const;
  static Vocab Parse(std::istream& in, const std::string& source = {});
  void Save(const std::filesystem::path& path) const;
  static Vocab Load(const std::filesystem::path& path);

  friend bool operator==(const Vocab& a, const Vocab& b) {
    return a.tokens_ == b.tokens_;
  }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, Index> ids_;
};

struct EncoderConfig {
  Index embedding_dim = 64;
  Index hidden_dim = 64;
};

// h_t = tanh(x_t W_in + h_{t-1} W_rec + b)
struct RnnCellParams {
  Tensor input_weights;      // [in, hidden]
  Tensor recurrent_weights;  // [hidden, hidden]
  Tensor bias;               // [hidden]
};

// Embedding lookup followed by one bidirectional tanh RNN layer.
//
// Tensors alias the ParamStore they were bound from, so updates made through
// the store (sgd_step, key updates) are visible here.
struct EncoderParams {
  Tensor embedding;  // [vocab, embedding_dim]
  RnnCellParams forward;
  RnnCellParams backward;

  Index hidden_dim() const { return forward.bias.shape().cols(); }
  Index output_dim() const { return 2 * hidden_dim(); }

  // Creates trainable parameters under `prefix` (default "encoder.") and
  // records the dims in the store metadata.
  static EncoderParams Create(ParamStore& store, Index vocab_size,
                              const EncoderConfig& config, std::mt19937_64& rng,
                              const std::string& prefix = "encoder.");
  static EncoderParams Bind(const ParamStore& store,
                            const std::string& prefix = "encoder.");
};

// Per-token representations, [tokens, output_dim]. Every row depends on the
// whole sentence.
Tensor encode(const EncoderParams& params, std::span<const Index> ids);
Tensor encode(const EncoderParams& params, const Vocab& vocab,
              std::span<const std::string> tokens);

// Mean over token rows.
Tensor pool(const Tensor& output);

// Key-encoder maintenance.
struct KeyUpdate {
  enum class Mode { kFrozen, kMomentum, kMirror };
  Mode mode = Mode::kMomentum;
  double momentum = 0.999;

  // "frozen", "mirror", "momentum" (0.999) or "momentum:<m>".
  static KeyUpdate Parse(const std::string& text);
  std::string ToString() const;
};

// Deep copy of every `prefix` parameter of `query`; the copy never receives
// gradients.
ParamStore init_key_from_query(const ParamStore& query,
                               const std::string& prefix = "encoder.");

// frozen: unchanged; momentum: key <- m key + (1 - m) query; mirror: key <-
// query. Applies to every key parameter, matched by name.
void update_key(ParamStore& key, const ParamStore& query,
                const KeyUpdate& update);

// Appends unseen tokens to `vocab` and grows the embedding table under
// `prefix` with freshly initialized rows. Returns the number of new tokens.
std::size_t ExtendVocabulary(ParamStore& store, Vocab& vocab,
                             std::span<const std::vector<std::string>> sentences,
                             std::mt19937_64& rng,
                             const std::string& prefix = "encoder.");

inline constexpr const char* kVocabMetaKey = "vocab";

}  // namespace wclner

#endif  // WCLNER_ENCODER_HPP_
