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
#include <cmath>
#include <random>

#include "doctest.h"
#include "support/gradcheck.hpp"
#include "wclner/error.hpp"
#include "wclner/numcore/ops.hpp"
#include "wclner/wcl.hpp"

namespace wclner {
namespace {

ProjectionHead IdentityHead(ParamStore& store, Index d) {
  store.Set("head.w1", Tensor::FromMatrix(Matrix::Identity(d, d), true));
  store.Set("head.b1", Tensor::Zeros(Shape::Vector(d), true));
  store.Set("head.w2", Tensor::FromMatrix(Matrix::Identity(d, d), true));
  store.Set("head.b2", Tensor::Zeros(Shape::Vector(d), true));
  return ProjectionHead::Bind(store);
}

double Value(const Tensor& t) { return t.item(); }

TEST_CASE("project examples") {
  ParamStore store;
  ProjectionHead head = IdentityHead(store, 2);
  Tensor out = project(head, Tensor::Vector({-1, 2}));
  CHECK(out.value() == (Matrix(1, 2) << 0, 2).finished());

  head.w1.mutable_value().setZero();
  head.w2.mutable_value().setZero();
  head.b2.mutable_value() << 0.5, -3;
  CHECK(project(head, Tensor::Vector({7, 8})).value() == head.b2.value());

  CHECK_THROWS_AS(project(head, Tensor::Vector({1, 2, 3})), ShapeError);
  Tape::Current().Clear();
}

TEST_CASE("project gradients match finite differences") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    ParamStore store;
    ProjectionHead head = ProjectionHead::Create(store, 4, 3, rng);
    head.b1.mutable_value() = testing::RandomMatrix(1, 4, rng);
    head.b2.mutable_value() = testing::RandomMatrix(1, 3, rng);
    Tensor v = testing::RandomParam(Shape::Vector(4), rng);
    Tensor probe = Tensor::FromRow(testing::RandomMatrix(1, 3, rng));
    auto loss = [&] { return dot(project(head, v), probe); };
    std::vector<Tensor> leaves{head.w1, head.b1, head.w2, head.b2, v};
    CHECK(testing::CheckGradients(loss, leaves).max_rel_error < 1e-5);
  }
}

TEST_CASE("similarity examples") {
  Tensor v = Tensor::Vector({3, -4, 1});
  CHECK(Value(similarity(v, v)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(Value(similarity(Tensor::Vector({1, 0}), Tensor::Vector({0, 1}))) == 0.0);
  CHECK(Value(similarity(v, scale(v, -1))) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(Value(similarity(Tensor::Vector({0, 0}), Tensor::Vector({1, 2}))) == 0.0);
  CHECK(Value(similarity(Tensor::Vector({1, 2}), Tensor::Vector({3, 4}),
                         SimilarityMode::kDot)) == 11.0);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor a = Tensor::FromRow(testing::RandomMatrix(1, 5, rng));
    Tensor b = Tensor::FromRow(testing::RandomMatrix(1, 5, rng));
    const double s = Value(similarity(a, b));
    CHECK(s <= 1.0 + 1e-12);
    CHECK(s >= -1.0 - 1e-12);
  }
  CHECK(ParseSimilarityMode("dot") == SimilarityMode::kDot);
  CHECK_THROWS_AS(ParseSimilarityMode("l2"), ConfigError);
  Tape::Current().Clear();
}

TEST_CASE("negative queue is FIFO with a fixed size") {
  std::mt19937_64 rng(1);
  NegativeQueue q(3, 2, rng);
  const Matrix init = q.Ordered();
  CHECK(q.size() == 3);

  q.EnqueueDequeue((RowVector(2) << 10, 10).finished());
  CHECK(q.size() == 3);
  // The first push evicts an initial vector, never a pushed key.
  CHECK(q.at(0) == init.row(1));
  CHECK(q.at(1) == init.row(2));
  CHECK(q.at(2) == (RowVector(2) << 10, 10).finished());

  for (int k = 0; k < 5; ++k) {
    q.EnqueueDequeue((RowVector(2) << k, -k).finished());
    CHECK(q.size() == 3);
  }
  for (int i = 0; i < 3; ++i) {
    CHECK(q.at(static_cast<std::size_t>(i)) ==
          (RowVector(2) << i + 2, -(i + 2)).finished());
  }
  CHECK_THROWS_AS(q.EnqueueDequeue(RowVector::Zero(3)), ShapeError);

  NegativeQueue empty;
  CHECK_THROWS_AS(build_msim(Tensor::Scalar(0.0), empty, Tensor::Vector({1, 0})),
                  ShapeError);
}

TEST_CASE("queue initialization is roughly standard normal") {
  std::mt19937_64 rng(2);
  NegativeQueue q(4000, 5, rng);
  const Matrix m = q.Ordered();
  const double mean = m.mean();
  const double var = (m.array() - mean).square().mean();
  CHECK(std::abs(mean) < 0.03);
  CHECK(std::abs(var - 1.0) < 0.05);
}

TEST_CASE("build_msim examples") {
  std::mt19937_64 rng(3);
  NegativeQueue one(1, 2, rng);
  one.EnqueueDequeue((RowVector(2) << 0, 5).finished());
  Tensor m = build_msim(Tensor::Scalar(0.9), one, Tensor::Vector({2, 0}));
  CHECK(m.shape() == Shape::Vector(2));
  CHECK(m.value()(0, 0) == 0.9);
  CHECK(m.value()(0, 1) == 0.0);

  NegativeQueue same(4, 3, rng);
  const RowVector anchor = (RowVector(3) << 1, -2, 0.5).finished();
  for (int k = 0; k < 4; ++k) same.EnqueueDequeue(anchor);
  Tensor all = build_msim(Tensor::Scalar(0.2), same, Tensor::FromRow(anchor));
  for (Index j = 1; j < 5; ++j) {
    CHECK(all.value()(0, j) == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Random instances against per-element evaluation.
  for (int trial = 0; trial < 100; ++trial) {
    NegativeQueue q(7, 4, rng);
    Tensor a = Tensor::FromRow(testing::RandomMatrix(1, 4, rng));
    for (SimilarityMode mode : {SimilarityMode::kCosine, SimilarityMode::kDot}) {
      Tensor ms = build_msim(Tensor::Scalar(0.3), q, a, mode);
      REQUIRE(ms.shape() == Shape::Vector(8));
      CHECK(ms.value()(0, 0) == 0.3);
      for (std::size_t j = 0; j < 7; ++j) {
        const double direct =
            Value(similarity(a, Tensor::FromRow(q.at(j)), mode));
        CHECK(ms.value()(0, static_cast<Index>(j) + 1) ==
              doctest::Approx(direct).epsilon(1e-12));
      }
    }
  }
  CHECK_THROWS_AS(build_msim(Tensor::Scalar(0.0), one, Tensor::Vector({1, 2, 3})),
                  ShapeError);
  Tape::Current().Clear();
}

TEST_CASE("info_nce closed forms") {
  for (double tau : {0.07, 1.0, 3.0}) {
    Tensor m = Tensor::Vector({0.4, 0.4, 0.4, 0.4, 0.4});
    CHECK(Value(info_nce(m, tau)) == doctest::Approx(std::log(5.0)).epsilon(1e-12));
  }
  CHECK(Value(info_nce(Tensor::Vector({1, 0}), 1.0)) ==
        doctest::Approx(0.313262).epsilon(1e-6));
  CHECK(Value(info_nce(Tensor::Vector({1, 0}), 0.1)) ==
        doctest::Approx(4.53989e-5).epsilon(1e-4));
  // Extreme logits stay finite.
  CHECK(std::isfinite(Value(info_nce(Tensor::Vector({1, -1}), 1e-4))));
  CHECK(std::isfinite(Value(info_nce(Tensor::Vector({-1, 1}), 1e-4))));
  CHECK_THROWS_AS(info_nce(Tensor::Vector({1, 0}), 0.0), ConfigError);
  CHECK_THROWS_AS(info_nce(Tensor::Vector({1, 0}), -1.0), ConfigError);
  Tape::Current().Clear();
}

TEST_CASE("info_nce properties") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> shift(-5.0, 5.0);
  for (int trial = 0; trial < 200; ++trial) {
    const Matrix base = testing::RandomMatrix(1, 6, rng);
    const double tau = 0.05 + (rng() % 100) / 50.0;
    const double loss = Value(info_nce(Tensor::FromRow(base), tau));
    CHECK(loss > 0.0);

    Matrix shifted = base.array() + shift(rng);
    CHECK(Value(info_nce(Tensor::FromRow(shifted), tau)) ==
          doctest::Approx(loss).epsilon(1e-9));

    Matrix higher = base;
    higher(0, 0) += 0.1;
    CHECK(Value(info_nce(Tensor::FromRow(higher), tau)) < loss);
  }

  for (int trial = 0; trial < 20; ++trial) {
    Tensor m = testing::RandomParam(Shape::Vector(5), rng);
    auto loss = [&] { return info_nce(m, 0.3); };
    CHECK(testing::CheckGradients(loss, {m}).max_rel_error < 1e-6);
  }
}

std::vector<SentencePair> Pairs() {
  return {
      {{"The", "European", "Commission", "met"}, {"the", "TEC", "met"}, 0},
      {{"Peter", "lives", "in", "Paris"}, {"Peter", "resides", "in", "Paris"}, 1},
      {{"Rome", "is", "old"}, {"Rome", "is", "ancient"}, 2},
      {{"Acme", "Corp", "hired", "Anna"}, {"Anna", "joined", "Acme", "Corp"}, 3},
  };
}

WclConfig SmallConfig() {
  WclConfig c;
  c.queue_size = 8;
  c.epochs = 1;
  c.tau = 0.1;
  c.lr = 0.05;
  c.seed = 4;
  return c;
}

TEST_CASE("one pair, one epoch, frozen key") {
  const auto all = Pairs();
  std::span<const SentencePair> one(all.data(), 1);
  WclConfig config = SmallConfig();
  config.key_update = KeyUpdate::Parse("frozen");
  WclModel model = WclModel::Create(one, {}, 4, {6, 5}, config);
  const std::string key_before = CheckpointBytes(model.key);
  const std::string query_before = CheckpointBytes(model.query);
  const Matrix queue_before = model.queue.Ordered();

  std::size_t hook_calls = 0;
  WclReport report = train_wcl(one, model, config,
                               [&](int, std::size_t, double) { ++hook_calls; });
  CHECK(report.steps == 1);
  CHECK(hook_calls == 1);
  CHECK(CheckpointBytes(model.key) == key_before);
  CHECK(CheckpointBytes(model.query) != query_before);
  for (const auto& [name, t] : model.key.params()) CHECK_FALSE(t.has_grad());
  for (const auto& [name, t] : model.query.params()) CHECK_FALSE(t.has_grad());

  // The newest queue entry is the normalized key.
  CHECK(model.queue.size() == 8);
  CHECK(model.queue.at(6) == queue_before.row(7));
  CHECK(model.queue.at(7).norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("key update modes during training") {
  const auto pairs = Pairs();
  WclConfig config = SmallConfig();
  config.key_update = KeyUpdate::Parse("mirror");
  WclModel model = WclModel::Create(pairs, {}, 4, {6, 5}, config);
  train_wcl(pairs, model, config);
  ParamStore shared;
  model.query.ExtractPrefix("encoder.", shared);
  model.query.ExtractPrefix("head.", shared);
  CHECK(model.key.names() == shared.names());
  for (const auto& [name, t] : model.key.params()) {
    CHECK(t.value() == shared.at(name).value());
  }
}

TEST_CASE("training is deterministic and rejects bad input") {
  const auto pairs = Pairs();
  WclConfig config = SmallConfig();
  config.epochs = 3;
  WclModel a = WclModel::Create(pairs, {}, 4, {6, 5}, config);
  WclModel b = WclModel::Create(pairs, {}, 4, {6, 5}, config);
  WclReport ra = train_wcl(pairs, a, config);
  WclReport rb = train_wcl(pairs, b, config);
  CHECK(ra.epoch_mean_loss == rb.epoch_mean_loss);
  CHECK(ra.steps == 12);
  CHECK(CheckpointBytes(a.query) == CheckpointBytes(b.query));
  CHECK(a.queue.Ordered() == b.queue.Ordered());

  CHECK_THROWS_AS(train_wcl({}, a, config), ConfigError);
  WclConfig bad = config;
  bad.tau = 0.0;
  CHECK_THROWS_AS(train_wcl(pairs, a, bad), ConfigError);
  bad = config;
  bad.queue_size = 0;
  CHECK_THROWS_AS(WclModel::Create(pairs, {}, 4, {6, 5}, bad), ConfigError);
}

TEST_CASE("non-finite loss reports pair and epoch") {
  const auto pairs = Pairs();
  WclConfig config = SmallConfig();
  config.similarity = SimilarityMode::kDot;
  WclModel model = WclModel::Create(pairs, {}, 4, {6, 5}, config);
  model.query.at("head.b2").mutable_value().setConstant(1e300);
  try {
    train_wcl(pairs, model, config);
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
    CHECK(std::string(e.what()).find("pair") != std::string::npos);
  }
}

TEST_CASE("training lowers the contrastive loss") {
  const auto pairs = Pairs();
  WclConfig config = SmallConfig();
  config.epochs = 15;
  config.lr = 0.3;
  // Fewer negatives than pairs, so a pair never meets its own earlier key.
  config.queue_size = 2;
  WclModel model = WclModel::Create(pairs, {}, 4, {8, 6}, config);
  WclReport report = train_wcl(pairs, model, config);
  CHECK(report.epoch_mean_loss.back() < report.epoch_mean_loss.front());
  Separation s = MeasureSeparation(pairs, model, config.similarity);
  CHECK(s.positive > s.negative);
}

}  // namespace
}  // namespace wclner
