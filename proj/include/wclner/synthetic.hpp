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
#ifndef WCLNER_SYNTHETIC_HPP_
#define WCLNER_SYNTHETIC_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "wclner/corpus.hpp"

// Small template-grammar corpus for smoke tests and end-to-end checks.
//
// Four types (PER, LOC, ORG, MISC). Every organisation has an acronym that
// is introduced next to its full name somewhere in each split. "Jordan"
// occurs both as a person and as a place.
namespace wclner {

struct SyntheticOptions {
  std::uint64_t seed = 2024;
  std::size_t train_sentences = 500;
  std::size_t test_sentences = 100;
  std::size_t pairs = 200;
  // Acronym tokens of the test split blanked to O in `noisy_test`.
  std::size_t injected_errors = 20;
};

struct InjectedError {
  std::size_t sentence = 0;
  std::size_t token = 0;
};

struct SyntheticFixture {
  TagSet tags;
  std::vector<TaggedSentence> train;
  std::vector<TaggedSentence> test;
  // Half the pairs use "Jordan" as a person, half as a place.
  std::vector<SentencePair> pairs;
  // Gold test tags with `errors` applied.
  std::vector<TaggedSentence> noisy_test;
  std::vector<InjectedError> errors;
  // surface <TAB> KG type label, organisations only.
  std::string kg_snapshot;

  // Every token of every split and pair.
  std::set<std::string> Vocabulary() const;
  // train.conll, test.conll, noisy.conll, pairs.tsv, kg.tsv, tags.txt.
  void Write(const std::filesystem::path& dir) const;
};

SyntheticFixture MakeSyntheticFixture(const SyntheticOptions& options = {});

}  // namespace wclner

#endif  // WCLNER_SYNTHETIC_HPP_
