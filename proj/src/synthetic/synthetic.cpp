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
#include "wclner/synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>

#include "wclner/error.hpp"

namespace wclner {

namespace {

struct Org {
  const char* name;
  const char* acronym;
};

const std::vector<const char*> kFirst{"Anna", "Peter", "Maria", "David",
                                      "Laura", "Omar"};
const std::vector<const char*> kLast{"Smith", "Chen",  "Garcia", "Miller",
                                     "Okafor", "Dubois", "Jordan"};
const std::vector<const char*> kLoc{"Paris", "Berlin", "Madrid",    "Cairo",
                                    "Lima",  "Oslo",   "New Delhi", "South Africa",
                                    "Jordan"};
const std::vector<Org> kOrg{{"European Trade Council", "ETC"},
                            {"National Health Service", "NHS"},
                            {"World Energy Forum", "WEF"},
                            {"United Rail Group", "URG"},
                            {"Global Water Alliance", "GWA"},
                            {"Pacific Mining Company", "PMC"}};
const std::vector<const char*> kMisc{"Olympic", "French", "German", "Nobel",
                                     "Euro"};
const std::vector<const char*> kDay{"Monday", "Tuesday", "Friday", "Sunday",
                                    "Wednesday"};

const char* kIntro = "{ORG} ( {ACR} ) said {PER} would lead the talks .";

const std::vector<const char*> kTemplates{
    kIntro,
    "{PER} visited {LOC} on {DAY} .",
    "{ACR} officials met {PER} in {LOC} .",
    "{PER} won the {MISC} prize in {LOC} .",
    "Shares in {ORG} rose on {DAY} , {ACR} said .",
    "{MISC} fans in {LOC} cheered for {PER} .",
    "{PER} joined {ORG} last year .",
    "Talks between {ACR} and {ORG2} ended in {LOC} .",
    "In {LOC} , {PER} told reporters that {ACR} will grow .",
    "{PER} flew to {LOC} on {DAY} .",
    "A spokesman for {ACR} declined to comment .",
    "The {MISC} delegation arrived in {LOC} with {PER} .",
};

// (original, back-translation); the first half casts Jordan as a person.
const std::vector<std::pair<const char*, const char*>> kPersonPairs{
    {"Jordan scored twice for {ORG} on {DAY} .",
     "On {DAY} , Jordan netted two goals for {ORG} ."},
    {"Jordan said the deal with {ACR} was fair .",
     "The deal with {ACR} was fair , Jordan said ."},
    {"Coach Jordan praised the players in {LOC} .",
     "In {LOC} , coach Jordan praised the players ."},
};
const std::vector<std::pair<const char*, const char*>> kPlacePairs{
    {"Troops crossed into Jordan on {DAY} .",
     "On {DAY} , soldiers entered Jordan ."},
    {"Prices rose sharply in Jordan last year .",
     "Last year prices in Jordan rose sharply ."},
    {"{PER} flew to Jordan for the talks .",
     "For the talks , {PER} travelled to Jordan ."},
};

template <typename T>
const T& Pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

class Filler {
 public:
  explicit Filler(std::mt19937_64& rng) : rng_(rng) {}

  // Fresh entity choices for one sentence; `org` forced when >= 0.
  void Reset(int org = -1) {
    org_ = org >= 0 ? static_cast<std::size_t>(org)
                    : std::uniform_int_distribution<std::size_t>(
                          0, kOrg.size() - 1)(rng_);
    do {
      org2_ = std::uniform_int_distribution<std::size_t>(0, kOrg.size() - 1)(rng_);
    } while (org2_ == org_);
    if (std::bernoulli_distribution(0.5)(rng_)) {
      person_ = {Pick(kFirst, rng_), Pick(kLast, rng_)};
    } else {
      person_ = {Pick(kLast, rng_)};
    }
    place_ = SplitWhitespace(Pick(kLoc, rng_));
    misc_ = Pick(kMisc, rng_);
    day_ = Pick(kDay, rng_);
  }

  TaggedSentence Expand(const char* pattern) const {
    TaggedSentence s;
    auto put = [&s](const std::vector<std::string>& tokens, const std::string& type) {
      for (std::size_t i = 0; i < tokens.size(); ++i) {
        s.tokens.push_back(tokens[i]);
        s.tags.push_back(type.empty() ? "O" : (i ? "I-" : "B-") + type);
      }
    };
    for (const std::string& slot : SplitWhitespace(pattern)) {
      if (slot == "{PER}") {
        put(person_, "PER");
      } else if (slot == "{LOC}") {
        put(place_, "LOC");
      } else if (slot == "{ORG}") {
        put(SplitWhitespace(kOrg[org_].name), "ORG");
      } else if (slot == "{ORG2}") {
        put(SplitWhitespace(kOrg[org2_].name), "ORG");
      } else if (slot == "{ACR}") {
        put({kOrg[org_].acronym}, "ORG");
      } else if (slot == "{MISC}") {
        put({misc_}, "MISC");
      } else if (slot == "{DAY}") {
        put({day_}, "");
      } else {
        put({slot}, "");
      }
    }
    return s;
  }

 private:
  std::mt19937_64& rng_;
  std::size_t org_ = 0;
  std::size_t org2_ = 1;
  std::vector<std::string> person_;
  std::vector<std::string> place_;
  std::string misc_;
  std::string day_;
};

std::vector<TaggedSentence> MakeSplit(std::size_t n, std::mt19937_64& rng) {
  Filler fill(rng);
  std::vector<TaggedSentence> out;
  out.reserve(n);
  // Each acronym is introduced at least once per split so that it can be
  // expanded from the split alone.
  for (std::size_t i = 0; i < kOrg.size() && out.size() < n; ++i) {
    fill.Reset(static_cast<int>(i));
    out.push_back(fill.Expand(kIntro));
  }
  while (out.size() < n) {
    fill.Reset();
    out.push_back(fill.Expand(Pick(kTemplates, rng)));
  }
  std::shuffle(out.begin(), out.end(), rng);
  return out;
}

void WriteText(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write", path.string());
  out << text;
}

}  // namespace

std::set<std::string> SyntheticFixture::Vocabulary() const {
  std::set<std::string> v;
  for (const auto* split : {&train, &test}) {
    for (const auto& s : *split) v.insert(s.tokens.begin(), s.tokens.end());
  }
  for (const auto& p : pairs) {
    v.insert(p.original.begin(), p.original.end());
    v.insert(p.back_translation.begin(), p.back_translation.end());
  }
  return v;
}

void SyntheticFixture::Write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  WriteConll(train, dir / "train.conll");
  WriteConll(test, dir / "test.conll");
  WriteConll(noisy_test, dir / "noisy.conll");
  std::string tsv;
  for (const auto& p : pairs) {
    tsv += JoinTokens(p.original, 0, p.original.size()) + "\t" +
           JoinTokens(p.back_translation, 0, p.back_translation.size()) + "\n";
  }
  WriteText(dir / "pairs.tsv", tsv);
  WriteText(dir / "kg.tsv", kg_snapshot);
  WriteText(dir / "tags.txt", tags.Serialize());
}

SyntheticFixture MakeSyntheticFixture(const SyntheticOptions& options) {
  std::mt19937_64 rng(options.seed);
  SyntheticFixture f;
  f.tags = TagSet({"PER", "LOC", "ORG", "MISC"});
  f.train = MakeSplit(options.train_sentences, rng);
  f.test = MakeSplit(options.test_sentences, rng);

  Filler fill(rng);
  for (std::size_t i = 0; i < options.pairs; ++i) {
    const auto& bank = i < options.pairs / 2 ? kPersonPairs : kPlacePairs;
    const auto& [a, b] = Pick(bank, rng);
    fill.Reset();
    SentencePair p;
    p.original = fill.Expand(a).tokens;
    p.back_translation = fill.Expand(b).tokens;
    p.index = i;
    f.pairs.push_back(std::move(p));
  }

  std::vector<InjectedError> candidates;
  for (std::size_t s = 0; s < f.test.size(); ++s) {
    for (std::size_t t = 0; t < f.test[s].size(); ++t) {
      const std::string& tok = f.test[s].tokens[t];
      const bool acronym = std::any_of(kOrg.begin(), kOrg.end(), [&](const Org& o) {
        return tok == o.acronym;
      });
      if (acronym) candidates.push_back({s, t});
    }
  }
  if (candidates.size() < options.injected_errors) {
    throw ConfigError("test split has only " + std::to_string(candidates.size()) +
                      " acronyms for " + std::to_string(options.injected_errors) +
                      " injected errors");
  }
  std::shuffle(candidates.begin(), candidates.end(), rng);
  candidates.resize(options.injected_errors);
  std::sort(candidates.begin(), candidates.end(),
            [](const InjectedError& a, const InjectedError& b) {
              return std::pair(a.sentence, a.token) < std::pair(b.sentence, b.token);
            });
  f.errors = candidates;
  f.noisy_test = f.test;
  for (const InjectedError& e : f.errors) f.noisy_test[e.sentence].tags[e.token] = "O";

  for (const Org& o : kOrg) f.kg_snapshot += std::string(o.name) + "\tOrganisation\n";
  return f;
}

}  // namespace wclner
