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
#include <random>
#include <sstream>

#include "doctest.h"
#include "support/gradcheck.hpp"
#include "wclner/encoder.hpp"
#include "wclner/error.hpp"
#include "wclner/numcore/ops.hpp"

namespace wclner {
namespace {

const std::vector<std::vector<std::string>> kSentences{
    {"The", "European", "Commission", "said"},
    {"the", "TEC", "said", "so"},
};

struct Fixture {
  Vocab vocab = Vocab::Build(kSentences);
  ParamStore store;
  EncoderParams params;

  explicit Fixture(EncoderConfig config = {8, 5}, std::uint64_t seed = 1) {
    std::mt19937_64 rng(seed);
    params = EncoderParams::Create(store, vocab.size(), config, rng);
  }
};

TEST_CASE("vocab") {
  Vocab v = Vocab::Build(kSentences);
  CHECK(v.size() == Vocab::kReserved + 7);
  CHECK(v.Id("The") != v.Id("the"));
  CHECK(v.Id("unseen") == Vocab::kUnknown);
  CHECK(v.Token(v.Id("TEC")) == "TEC");
  CHECK(v.Id("The") == Vocab::kReserved);

  std::istringstream in(v.Serialize());
  CHECK(Vocab::Parse(in) == v);
  std::istringstream bad("a\na\n");
  CHECK_THROWS_AS(Vocab::Parse(bad), DataError);
}

TEST_CASE("encode shapes and determinism") {
  Fixture f;
  const std::vector<std::string> one{"TEC"};
  Tensor out = encode(f.params, f.vocab, one);
  CHECK(out.shape() == Shape::Mat(1, 10));
  CHECK(f.params.output_dim() == 10);

  // Out-of-vocabulary tokens use the unknown row.
  const std::vector<std::string> oov{"zzz", "said"};
  CHECK(encode(f.params, f.vocab, oov).shape() == Shape::Mat(2, 10));
  CHECK(encode(f.params, f.vocab, kSentences[0]).value() ==
        encode(f.params, f.vocab, kSentences[0]).value());
  Tape::Current().Clear();
}

TEST_CASE("single token: both directions start from zero state") {
  EncoderConfig config{4, 3};
  Fixture f(config);
  // Make both directions identical; then the two halves of a length-1
  // output must agree.
  f.params.backward.input_weights.mutable_value() =
      f.params.forward.input_weights.value();
  f.params.backward.recurrent_weights.mutable_value() =
      f.params.forward.recurrent_weights.value();
  const std::vector<std::string> one{"said"};
  Tensor out = encode(f.params, f.vocab, one);
  CHECK(out.value().leftCols(3) == out.value().rightCols(3));
  Tape::Current().Clear();
}

TEST_CASE("relabeling symmetry") {
  Fixture f;
  // Same tokens registered in reverse order.
  Vocab permuted;
  std::vector<std::string> all;
  for (Index id = Vocab::kReserved; id < f.vocab.size(); ++id) {
    all.push_back(f.vocab.Token(id));
  }
  for (auto it = all.rbegin(); it != all.rend(); ++it) permuted.Add(*it);

  ParamStore other = f.store.Clone();
  Matrix table = f.params.embedding.value();
  for (Index id = Vocab::kReserved; id < f.vocab.size(); ++id) {
    table.row(permuted.Id(f.vocab.Token(id))) =
        f.params.embedding.value().row(id);
  }
  other.at("encoder.embedding").mutable_value() = table;
  EncoderParams q = EncoderParams::Bind(other);
  CHECK(f.vocab.Id("TEC") != permuted.Id("TEC"));
  for (const auto& s : kSentences) {
    CHECK(encode(f.params, f.vocab, s).value() ==
          encode(q, permuted, s).value());
  }
  Tape::Current().Clear();
}

TEST_CASE("bidirectional context: prefix rows see the suffix") {
  Fixture f;
  std::vector<std::string> a{"The", "European", "Commission", "said"};
  std::vector<std::string> b{"The", "European", "Commission", "so"};
  Tensor ra = encode(f.params, f.vocab, a);
  Tensor rb = encode(f.params, f.vocab, b);
  CHECK(ra.value().row(0) != rb.value().row(0));
  Tape::Current().Clear();
}

TEST_CASE("encoder gradients match finite differences") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 10; ++trial) {
    Fixture f({3, 2}, 100 + trial);
    Tensor probe(Shape::Mat(3, 4), testing::RandomMatrix(3, 4, rng));
    const std::vector<std::string> tokens{"the", "TEC", "said"};
    auto loss = [&] { return sum(mul(encode(f.params, f.vocab, tokens), probe)); };
    std::vector<Tensor> leaves;
    for (const auto& [name, t] : f.store.params()) leaves.push_back(t);
    CHECK(testing::CheckGradients(loss, leaves).max_rel_error < 1e-4);
  }
}

TEST_CASE("pool is the row mean") {
  Tensor one = Tensor::FromMatrix((Matrix(1, 2) << 4, -1).finished());
  CHECK(pool(one).value() == one.value());
  Tensor sym = Tensor::FromMatrix((Matrix(2, 3) << 1, 2, 3, -1, -2, -3).finished());
  CHECK(pool(sym).value().isZero());
  Tensor two = Tensor::FromMatrix((Matrix(2, 2) << 1, 1, 3, 3).finished());
  CHECK(pool(two).value() == (Matrix(1, 2) << 2, 2).finished());

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Index rows = 1 + static_cast<Index>(rng() % 6);
    Matrix m = testing::RandomMatrix(rows, 5, rng);
    Matrix p = pool(Tensor::FromMatrix(m)).value();
    for (Index c = 0; c < 5; ++c) {
      CHECK(p(0, c) <= m.col(c).maxCoeff() + 1e-12);
      CHECK(p(0, c) >= m.col(c).minCoeff() - 1e-12);
    }
  }
}

TEST_CASE("init_key_from_query is a deep copy") {
  Fixture f;
  ParamStore key = init_key_from_query(f.store);
  ParamStore key2 = init_key_from_query(f.store);
  CHECK(CheckpointBytes(key) == CheckpointBytes(f.store));
  CHECK(CheckpointBytes(key) == CheckpointBytes(key2));

  f.store.at("encoder.embedding").mutable_value()(0, 0) += 1.0;
  CHECK(CheckpointBytes(key) == CheckpointBytes(key2));
  CHECK(CheckpointBytes(key) != CheckpointBytes(f.store));
  for (const auto& [name, t] : key.params()) CHECK_FALSE(t.requires_grad());
}

TEST_CASE("key parameters never receive gradients") {
  Fixture f;
  ParamStore key = init_key_from_query(f.store);
  EncoderParams kp = EncoderParams::Bind(key);
  Tensor q = pool(encode(f.params, f.vocab, kSentences[0]));
  Tensor k = pool(encode(kp, f.vocab, kSentences[1]));
  backward(dot(q, k));
  for (const auto& [name, t] : key.params()) CHECK_FALSE(t.has_grad());
  CHECK(f.store.at("encoder.embedding").has_grad());
  f.store.ClearGrads();
}

TEST_CASE("update_key modes") {
  ParamStore query;
  query.Set("encoder.w", Tensor::Scalar(2.0, true));
  ParamStore key;
  key.Set("encoder.w", Tensor::Scalar(0.0));

  update_key(key, query, KeyUpdate::Parse("frozen"));
  CHECK(key.at("encoder.w").item() == 0.0);

  update_key(key, query, KeyUpdate::Parse("momentum:0.5"));
  CHECK(key.at("encoder.w").item() == 1.0);

  key.at("encoder.w").mutable_value()(0, 0) = 0.0;
  update_key(key, query, KeyUpdate::Parse("momentum:0.999999"));
  CHECK(key.at("encoder.w").item() == doctest::Approx(0.0).epsilon(1e-5));

  update_key(key, query, KeyUpdate::Parse("mirror"));
  CHECK(key.at("encoder.w").item() == 2.0);

  CHECK_THROWS_AS(KeyUpdate::Parse("momentum:1"), ConfigError);
  CHECK_THROWS_AS(KeyUpdate::Parse("momentum:0"), ConfigError);
  CHECK_THROWS_AS(KeyUpdate::Parse("momentum:abc"), ConfigError);
  CHECK_THROWS_AS(KeyUpdate::Parse("sideways"), ConfigError);
  KeyUpdate bad;
  bad.momentum = 1.0;
  CHECK_THROWS_AS(update_key(key, query, bad), ConfigError);
  CHECK(KeyUpdate::Parse("momentum").momentum == 0.999);
}

TEST_CASE("extend vocabulary keeps existing rows") {
  Fixture f;
  const Matrix before = f.params.embedding.value();
  std::mt19937_64 rng(3);
  std::vector<std::vector<std::string>> more{{"new", "said", "words"}};
  CHECK(ExtendVocabulary(f.store, f.vocab, more, rng) == 2);
  const Tensor& table = f.store.at("encoder.embedding");
  CHECK(table.shape().rows() == f.vocab.size());
  CHECK(table.value().topRows(before.rows()) == before);
  CHECK(ExtendVocabulary(f.store, f.vocab, more, rng) == 0);
}

}  // namespace
}  // namespace wclner
