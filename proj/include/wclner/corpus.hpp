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
#ifndef WCLNER_CORPUS_HPP_
#define WCLNER_CORPUS_HPP_

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace wclner {

// Entity types known to a dataset, e.g. {PER, LOC, ORG, MISC}.
//
// Tag ids used by the tagger are "O" = 0 followed by B-/I- pairs in type
// order: B-T0 = 1, I-T0 = 2, B-T1 = 3, ...
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(std::vector<std::string> types);

  static TagSet Conll2003();
  // One type per line; blank lines and '#' comments ignored.
  static TagSet Load(const std::filesystem::path& path);
  static TagSet Parse(std::istream& in, const std::string& source = {});

  const std::vector<std::string>& types() const { return types_; }
  std::size_t num_types() const { return types_.size(); }
  bool contains(std::string_view type) const;

  std::size_t num_labels() const { return 2 * types_.size() + 1; }
  const std::vector<std::string>& labels() const { return labels_; }
  // Id of a BIO label; nullopt when the label is not in this set.
  std::optional<int> LabelId(std::string_view label) const;
  const std::string& Label(int id) const { return labels_.at(id); }

  // Types one per line, loadable by Parse().
  std::string Serialize() const;

  friend bool operator==(const TagSet& a, const TagSet& b) {
    return a.types_ == b.types_;
  }

 private:
  std::vector<std::string> types_;
  std::vector<std::string> labels_;
  std::map<std::string, int, std::less<>> label_ids_;
};

struct TaggedSentence {
  std::vector<std::string> tokens;
  std::vector<std::string> tags;

  std::size_t size() const { return tokens.size(); }
  friend bool operator==(const TaggedSentence&,
                         const TaggedSentence&) = default;
};

// Inclusive token range [start, end] carrying one entity type.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  std::string type;

  friend auto operator<=>(const Span&, const Span&) = default;
};

struct SentencePair {
  std::vector<std::string> original;
  std::vector<std::string> back_translation;
  std::size_t index = 0;
};

struct CorpusStats {
  std::size_t sentences = 0;
  std::size_t tokens = 0;
  std::size_t entities = 0;
  std::map<std::string, std::size_t> per_type;
};

// A split BIO/IOB tag: prefix is 'O', 'B' or 'I'.
struct TagParts {
  char prefix = 'O';
  std::string_view type;
};

// Syntactic parse of "O", "B-X" or "I-X"; nullopt on anything else.
std::optional<TagParts> SplitTag(std::string_view tag);

// Throws DataError unless tokens and tags are non-empty, equal in length and
// syntactically valid; with a tag set, every type must belong to it.
void ValidateSentence(const TaggedSentence& s, const TagSet* tags = nullptr);

struct ConllOptions {
  // Column indices; negative values count from the last column (-1 = last).
  int token_column = 0;
  int tag_column = -1;
  // When set, tags must belong to `tag_set`.
  bool strict = false;
  TagSet tag_set = TagSet::Conll2003();
};

std::vector<TaggedSentence> ParseConll(std::istream& in,
                                       const ConllOptions& options = {},
                                       const std::string& source = {});
std::vector<TaggedSentence> ParseConll(const std::filesystem::path& path,
                                       const ConllOptions& options = {});

// Writes "token tag" lines with a blank line after each sentence.
void WriteConll(std::span<const TaggedSentence> sentences, std::ostream& out);
void WriteConll(std::span<const TaggedSentence> sentences,
                const std::filesystem::path& path);

// Maximal entity spans with conlleval leniency: an I-X that does not continue
// a B-X/I-X opens a new span.
std::vector<Span> ExtractSpans(std::span<const std::string> tags);
// BIO tags for non-overlapping spans over a sentence of `length` tokens.
std::vector<std::string> TagsFromSpans(std::span<const Span> spans,
                                       std::size_t length);

// IOB (I- opens an entity, B- only separates adjacent same-type entities) to
// BIO. The span set is preserved.
TaggedSentence IobToBio(const TaggedSentence& s);

// Tab-separated pairs, tokens space-separated within each column. Blank lines
// are skipped; pair indices follow file order.
std::vector<SentencePair> LoadPairs(std::istream& in,
                                    const std::string& source = {});
std::vector<SentencePair> LoadPairs(const std::filesystem::path& path);

CorpusStats ComputeStats(std::span<const TaggedSentence> sentences);
// Aligned text table followed by key=value lines.
std::string FormatStats(const CorpusStats& stats);

// Splits on runs of spaces and tabs.
std::vector<std::string> SplitWhitespace(std::string_view line);
std::string JoinTokens(std::span<const std::string> tokens, std::size_t begin,
                       std::size_t end);

}  // namespace wclner

#endif  // WCLNER_CORPUS_HPP_
