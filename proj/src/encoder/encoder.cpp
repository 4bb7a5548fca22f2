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
#include "wclner/encoder.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "wclner/error.hpp"
#include "wclner/numcore/ops.hpp"

namespace wclner {

Vocab Vocab::Build(std::span<const std::vector<std::string>> sentences,
                   std::size_t min_count) {
  std::unordered_map<std::string, std::size_t> counts;
  std::vector<std::string> order;
  for (const auto& s : sentences) {
    for (const std::string& tok : s) {
      if (counts[tok]++ == 0) order.push_back(tok);
    }
  }
  Vocab v;
  for (const std::string& tok : order) {
    if (counts[tok] >= min_count) v.Add(tok);
  }
  return v;
}

Index Vocab::Add(const std::string& token) {
  auto [it, inserted] = ids_.emplace(token, size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

Index Vocab::Id(const std::string& token) const {
  auto it = ids_.find(token);
  return it == ids_.end() ? kUnknown : it->second;
}

bool Vocab::contains(const std::string& token) const {
  return ids_.count(token) != 0;
}

const std::string& Vocab::Token(Index id) const {
  static const std::string kPadToken = "<pad>";
  static const std::string kUnknownToken = "<unk>";
  if (id == kPad) return kPadToken;
  if (id == kUnknown) return kUnknownToken;
  return tokens_.at(static_cast<std::size_t>(id - kReserved));
}

std::vector<Index> Vocab::Encode(std::span<const std::string> tokens) const {
  std::vector<Index> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(Id(t));
  return ids;
}

std::string Vocab::Serialize() const {
  std::string out;
  for (const std::string& t : tokens_) out += t + "\n";
  return out;
}

Vocab Vocab::Parse(std::istream& in, const std::string& source) {
  Vocab v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.find_first_of(" \t") != std::string::npos) {
      throw DataError("vocabulary entries must be single tokens", source,
                      line_no);
    }
    if (v.contains(line)) {
      throw DataError("duplicate vocabulary entry '" + line + "'", source,
                      line_no);
    }
    v.Add(line);
  }
  return v;
}

void Vocab::Save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing", path.string());
  out << Serialize();
}

Vocab Vocab::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open vocabulary", path.string());
  return Parse(in, path.string());
}

namespace {

RnnCellParams CreateCell(ParamStore& store, const std::string& prefix,
                         Index in, Index hidden, std::mt19937_64& rng) {
  const double scale = 1.0 / std::sqrt(static_cast<double>(hidden));
  RnnCellParams c;
  c.input_weights =
      store.CreateUniform(prefix + "w_in", Shape::Mat(in, hidden), scale, rng);
  c.recurrent_weights = store.CreateUniform(
      prefix + "w_rec", Shape::Mat(hidden, hidden), scale, rng);
  c.bias = store.CreateZeros(prefix + "bias", Shape::Vector(hidden));
  return c;
}

RnnCellParams BindCell(const ParamStore& store, const std::string& prefix) {
  return {store.at(prefix + "w_in"), store.at(prefix + "w_rec"),
          store.at(prefix + "bias")};
}

// Hidden states of one direction, stacked in sentence order.
Tensor RunDirection(const RnnCellParams& cell, const Tensor& inputs,
                    bool reverse) {
  const Index steps = inputs.shape().rows();
  Tensor projected = add(matmul(inputs, cell.input_weights), cell.bias);
  std::vector<Tensor> states(static_cast<std::size_t>(steps));
  Tensor h;
  for (Index k = 0; k < steps; ++k) {
    const Index t = reverse ? steps - 1 - k : k;
    Tensor pre = row(projected, t);
    if (h.defined()) pre = add(pre, matmul(h, cell.recurrent_weights));
    h = tanh(pre);
    states[static_cast<std::size_t>(t)] = h;
  }
  return stack_rows(states);
}

}  // namespace

EncoderParams EncoderParams::Create(ParamStore& store, Index vocab_size,
                                    const EncoderConfig& config,
                                    std::mt19937_64& rng,
                                    const std::string& prefix) {
  if (config.embedding_dim <= 0 || config.hidden_dim <= 0 || vocab_size <= 0) {
    throw ConfigError("encoder dimensions must be positive");
  }
  EncoderParams p;
  p.embedding = store.CreateUniform(
      prefix + "embedding", Shape::Mat(vocab_size, config.embedding_dim), 0.5,
      rng);
  p.forward = CreateCell(store, prefix + "fwd.", config.embedding_dim,
                         config.hidden_dim, rng);
  p.backward = CreateCell(store, prefix + "bwd.", config.embedding_dim,
                          config.hidden_dim, rng);
  store.meta()[prefix + "embedding_dim"] = std::to_string(config.embedding_dim);
  store.meta()[prefix + "hidden_dim"] = std::to_string(config.hidden_dim);
  return p;
}

EncoderParams EncoderParams::Bind(const ParamStore& store,
                                  const std::string& prefix) {
  EncoderParams p;
  p.embedding = store.at(prefix + "embedding");
  p.forward = BindCell(store, prefix + "fwd.");
  p.backward = BindCell(store, prefix + "bwd.");
  if (p.forward.input_weights.shape().rows() != p.embedding.shape().cols() ||
      !(p.forward.bias.shape() == p.backward.bias.shape())) {
    throw ShapeError("encoder parameters have inconsistent dimensions");
  }
  return p;
}

Tensor encode(const EncoderParams& params, std::span<const Index> ids) {
  if (ids.empty()) throw ShapeError("encode: empty token list");
  Tensor inputs = gather_rows(params.embedding, ids);
  std::vector<Tensor> halves{RunDirection(params.forward, inputs, false),
                             RunDirection(params.backward, inputs, true)};
  return concat(halves, 1);
}

Tensor encode(const EncoderParams& params, const Vocab& vocab,
              std::span<const std::string> tokens) {
  const std::vector<Index> ids = vocab.Encode(tokens);
  return encode(params, ids);
}

Tensor pool(const Tensor& output) { return mean_rows(output); }

KeyUpdate KeyUpdate::Parse(const std::string& text) {
  KeyUpdate u;
  if (text == "frozen") {
    u.mode = Mode::kFrozen;
  } else if (text == "mirror") {
    u.mode = Mode::kMirror;
  } else if (text == "momentum") {
    u.mode = Mode::kMomentum;
  } else if (text.rfind("momentum:", 0) == 0) {
    u.mode = Mode::kMomentum;
    const std::string value = text.substr(9);
    std::size_t used = 0;
    try {
      u.momentum = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != value.size() || value.empty()) {
      throw ConfigError("invalid momentum '" + value + "'");
    }
  } else {
    throw ConfigError("unknown key update mode '" + text +
                      "' (frozen, mirror, momentum[:m])");
  }
  if (u.mode == Mode::kMomentum && !(u.momentum > 0.0 && u.momentum < 1.0)) {
    throw ConfigError("momentum must lie in (0, 1), got " + text);
  }
  return u;
}

std::string KeyUpdate::ToString() const {
  switch (mode) {
    case Mode::kFrozen:
      return "frozen";
    case Mode::kMirror:
      return "mirror";
    case Mode::kMomentum: {
      std::ostringstream out;
      out.precision(17);
      out << "momentum:" << momentum;
      return out.str();
    }
  }
  return {};
}

ParamStore init_key_from_query(const ParamStore& query,
                               const std::string& prefix) {
  ParamStore shared;
  query.ExtractPrefix(prefix, shared);
  ParamStore key = shared.Clone();
  key.SetRequiresGrad(false);
  for (const auto& [k, v] : query.meta()) key.meta()[k] = v;
  return key;
}

void update_key(ParamStore& key, const ParamStore& query,
                const KeyUpdate& update) {
  if (update.mode == KeyUpdate::Mode::kMomentum &&
      !(update.momentum > 0.0 && update.momentum < 1.0)) {
    throw ConfigError("momentum must lie in (0, 1)");
  }
  if (update.mode == KeyUpdate::Mode::kFrozen) return;
  for (const auto& [name, k] : key.params()) {
    const Tensor& q = query.at(name);
    if (!(q.shape() == k.shape())) {
      throw ShapeError("update_key: parameter " + name + " has shapes " +
                       k.shape().ToString() + " and " + q.shape().ToString());
    }
    Matrix& kv = k.node()->value;
    if (update.mode == KeyUpdate::Mode::kMirror) {
      kv = q.value();
    } else {
      kv = update.momentum * kv + (1.0 - update.momentum) * q.value();
    }
  }
}

std::size_t ExtendVocabulary(ParamStore& store, Vocab& vocab,
                             std::span<const std::vector<std::string>> sentences,
                             std::mt19937_64& rng, const std::string& prefix) {
  const Index before = vocab.size();
  for (const auto& s : sentences) {
    for (const std::string& tok : s) vocab.Add(tok);
  }
  const Index added = vocab.size() - before;
  const Tensor& old = store.at(prefix + "embedding");
  if (old.shape().rows() != before) {
    throw ShapeError("embedding table has " +
                     std::to_string(old.shape().rows()) + " rows for " +
                     std::to_string(before) + " vocabulary ids");
  }
  if (added == 0) return 0;
  std::uniform_real_distribution<double> dist(-0.5, 0.5);
  Matrix grown(vocab.size(), old.shape().cols());
  grown.topRows(before) = old.value();
  for (Index r = before; r < grown.rows(); ++r) {
    for (Index c = 0; c < grown.cols(); ++c) grown(r, c) = dist(rng);
  }
  store.Set(prefix + "embedding",
            Tensor::FromMatrix(grown, old.requires_grad()));
  return static_cast<std::size_t>(added);
}

}  // namespace wclner
