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
#ifndef WCLNER_KG_HPP_
#define WCLNER_KG_HPP_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "wclner/corpus.hpp"

// Knowledge-graph correction: surface-form lookup, potential-entity
// harvesting and retagging of predictions that disagree with the graph.
namespace wclner {

// Knowledge-graph type label -> dataset entity type.
class TypeMap {
 public:
  enum class Policy {
    kDrop,   // unmapped types are ignored (and counted)
    kError,  // unmapped types are a data error
  };

  TypeMap() = default;
  explicit TypeMap(std::map<std::string, std::string> entries,
                   Policy policy = Policy::kDrop);

  // Person -> PER, Place -> LOC, Organisation/Organization -> ORG.
  static TypeMap Conll2003Default();
  // TSV: kg-type <TAB> dataset-type; blank lines and '#' comments ignored.
  static TypeMap Parse(std::istream& in, const std::string& source = {});
  static TypeMap Load(const std::filesystem::path& path);

  Policy policy() const { return policy_; }
  void set_policy(Policy p) { policy_ = p; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

  // Looks up the label as given, then its local name (the part after the last
  // '/', '#' or ':'), so "http://dbpedia.org/ontology/Place" maps like "Place".
  std::optional<std::string> Map(const std::string& kg_type) const;

 private:
  std::map<std::string, std::string> entries_;
  Policy policy_ = Policy::kDrop;
};

TypeMap::Policy ParseTypePolicy(const std::string& text);

// Case-sensitive surface form (tokens joined by single spaces) -> dataset
// types in snapshot order, without duplicates.
class KgIndex {
 public:
  struct LoadStats {
    std::size_t records = 0;
    std::size_t dropped_types = 0;
    std::size_t skipped_lines = 0;
  };

  void Add(const std::string& surface, const std::string& type);
  // nullptr on a miss.
  const std::vector<std::string>* Lookup(const std::string& surface) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  // Longest surface form, in tokens.
  std::size_t max_tokens() const { return max_tokens_; }
  const LoadStats& stats() const { return stats_; }

  // Snapshot TSV: surface <TAB> type label, one record per line. With
  // `strict`, malformed lines are data errors; otherwise they are skipped and
  // counted.
  static KgIndex Parse(std::istream& in, const TypeMap& types,
                       bool strict = true, const std::string& source = {});
  static KgIndex Load(const std::filesystem::path& path, const TypeMap& types,
                      bool strict = true);

  friend bool operator==(const KgIndex& a, const KgIndex& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::unordered_map<std::string, std::vector<std::string>> entries_;
  std::size_t max_tokens_ = 0;
  LoadStats stats_;
};

// Normalizes whitespace: tokens joined by single spaces.
std::string SurfaceKey(std::span<const std::string> tokens);

// True for words of two or more characters, all ASCII uppercase letters.
bool IsAcronym(const std::string& word);

// Distinct token windows (in order of first occurrence) whose first letters,
// uppercased, spell `word`. Non-acronyms give no candidates.
std::vector<std::string> expand_acronym(
    const std::string& word, std::span<const std::vector<std::string>> sentences);

// Every contiguous sub-phrase, shortest first, then left to right; n(n+1)/2
// entries for n tokens.
std::vector<std::string> enumerate_subphrases(std::span<const std::string> tokens);

// Surface -> dataset types; the first type is the one used for correction.
using PotentialEntitySet = std::map<std::string, std::vector<std::string>>;

// Returns mapped dataset types for a surface form (empty on a miss).
using KgLookup = std::function<std::vector<std::string>(const std::string&)>;

struct PeOptions {
  // Longest capitalized window looked up directly.
  std::size_t max_window = 6;
  // When set, types outside the tag set are dropped, or rejected under
  // Policy::kError.
  const TagSet* tags = nullptr;
  TypeMap::Policy policy = TypeMap::Policy::kDrop;
};

PotentialEntitySet build_pe(std::span<const std::vector<std::string>> sentences,
                            const KgLookup& lookup, const PeOptions& options = {});
PotentialEntitySet build_pe(std::span<const std::vector<std::string>> sentences,
                            const KgIndex& index, const PeOptions& options = {});

struct Correction {
  std::size_t sentence = 0;
  Span span;  // new span
  std::string surface;
};

// Retags PE phrases whose predicted type disagrees with the graph. Matching is
// case-sensitive, token aligned, longest first, left to right and
// non-overlapping. A match is consistent when every token in it carries
// B-X or I-X for one of the phrase's types; otherwise the tokens become
// B-X I-X ... with X the first type, and a following I- tag is turned into
// B- so the output stays well-formed.
std::vector<TaggedSentence> modify_entities(
    std::span<const TaggedSentence> predicted, const PotentialEntitySet& pe,
    std::vector<Correction>* corrections = nullptr);

// HTTP lookup with an on-disk TSV cache (surface <TAB> comma-joined types).
// Network failures degrade to a miss and bump warnings(); they never throw.
class RemoteLookup {
 public:
  // `endpoint` is a URL prefix; the URL-encoded surface form is appended.
  RemoteLookup(std::string endpoint, std::filesystem::path cache_path,
               TypeMap types);

  // Raw KG type labels.
  std::vector<std::string> RawTypes(const std::string& surface);
  // Dataset types through the type map.
  std::vector<std::string> Lookup(const std::string& surface);

  std::size_t warnings() const { return warnings_; }
  std::size_t network_calls() const { return network_calls_; }
  std::size_t cache_size() const { return cache_.size(); }

 private:
  void Append(const std::string& surface, const std::vector<std::string>& types);

  std::string endpoint_;
  std::filesystem::path cache_path_;
  TypeMap types_;
  std::map<std::string, std::vector<std::string>> cache_;
  std::size_t warnings_ = 0;
  std::size_t network_calls_ = 0;
  std::mutex mutex_;
};

// Type labels in a lookup response: a JSON array of strings,
// {"types": [...]}, or a DBpedia Lookup document list whose entries carry
// "type" or "typeName" arrays. Unrecognized bodies give no types.
std::vector<std::string> ParseLookupResponse(const std::string& body);

std::string UrlEncode(const std::string& text);

}  // namespace wclner

#endif  // WCLNER_KG_HPP_
