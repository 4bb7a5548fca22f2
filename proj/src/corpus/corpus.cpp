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
#include "wclner/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "wclner/error.hpp"

namespace wclner {

TagSet::TagSet(std::vector<std::string> types) : types_(std::move(types)) {
  labels_.push_back("O");
  for (const std::string& t : types_) {
    if (t.empty() || t.find_first_of(" \t") != std::string::npos) {
      throw ConfigError("invalid entity type '" + t + "'");
    }
    if (std::count(types_.begin(), types_.end(), t) > 1) {
      throw ConfigError("duplicate entity type '" + t + "'");
    }
    labels_.push_back("B-" + t);
    labels_.push_back("I-" + t);
  }
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    label_ids_.emplace(labels_[i], static_cast<int>(i));
  }
}

TagSet TagSet::Conll2003() { return TagSet({"PER", "LOC", "ORG", "MISC"}); }

TagSet TagSet::Parse(std::istream& in, const std::string& source) {
  std::vector<std::string> types;
  std::string line;
  while (std::getline(in, line)) {
    auto fields = SplitWhitespace(line);
    if (fields.empty() || fields[0][0] == '#') continue;
    types.push_back(fields[0]);
  }
  if (types.empty()) throw ConfigError("empty tag set " + source);
  return TagSet(std::move(types));
}

TagSet TagSet::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tag set file " + path.string());
  return Parse(in, path.string());
}

bool TagSet::contains(std::string_view type) const {
  return std::find(types_.begin(), types_.end(), type) != types_.end();
}

std::optional<int> TagSet::LabelId(std::string_view label) const {
  auto it = label_ids_.find(label);
  if (it == label_ids_.end()) return std::nullopt;
  return it->second;
}

std::string TagSet::Serialize() const {
  std::string out;
  for (const std::string& t : types_) out += t + "\n";
  return out;
}

std::optional<TagParts> SplitTag(std::string_view tag) {
  if (tag == "O") return TagParts{'O', {}};
  if (tag.size() < 3 || tag[1] != '-') return std::nullopt;
  if (tag[0] != 'B' && tag[0] != 'I') return std::nullopt;
  return TagParts{tag[0], tag.substr(2)};
}

void ValidateSentence(const TaggedSentence& s, const TagSet* tags) {
  if (s.tokens.empty()) throw DataError("empty sentence");
  if (s.tokens.size() != s.tags.size()) {
    throw DataError("sentence has " + std::to_string(s.tokens.size()) +
                    " tokens but " + std::to_string(s.tags.size()) + " tags");
  }
  for (const std::string& tag : s.tags) {
    auto parts = SplitTag(tag);
    if (!parts) throw DataError("malformed tag '" + tag + "'");
    if (tags && parts->prefix != 'O' && !tags->contains(parts->type)) {
      throw DataError("unknown tag '" + tag + "'");
    }
  }
}

std::vector<std::string> SplitWhitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' ||
                               line[i] == '\r' || line[i] == '\n')) {
      ++i;
    }
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' &&
           line[i] != '\r' && line[i] != '\n') {
      ++i;
    }
    if (i > start) out.emplace_back(line.substr(start, i - start));
  }
  return out;
}

std::string JoinTokens(std::span<const std::string> tokens, std::size_t begin,
                       std::size_t end) {
  std::string out;
  for (std::size_t i = begin; i < end; ++i) {
    if (i > begin) out += ' ';
    out += tokens[i];
  }
  return out;
}

namespace {

std::size_t ResolveColumn(int column, std::size_t width) {
  if (column >= 0) return static_cast<std::size_t>(column);
  const auto back = static_cast<std::size_t>(-column);
  return back <= width ? width - back : width;  // width = out of range
}

}  // namespace

std::vector<TaggedSentence> ParseConll(std::istream& in,
                                       const ConllOptions& options,
                                       const std::string& source) {
  std::vector<TaggedSentence> out;
  TaggedSentence current;
  std::size_t current_start = 0;
  auto flush = [&]() {
    if (current.tokens.empty()) return;
    try {
      ValidateSentence(current, options.strict ? &options.tag_set : nullptr);
    } catch (const DataError& e) {
      throw DataError(e.what(), source, current_start);
    }
    out.push_back(std::move(current));
    current = {};
  };

  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto fields = SplitWhitespace(line);
    if (fields.empty()) {
      flush();
      continue;
    }
    if (fields[0] == "-DOCSTART-") {
      flush();
      continue;
    }
    const std::size_t tok = ResolveColumn(options.token_column, fields.size());
    const std::size_t tag = ResolveColumn(options.tag_column, fields.size());
    if (tok >= fields.size() || tag >= fields.size() || tok == tag) {
      throw DataError("expected token and tag columns, found " +
                          std::to_string(fields.size()) + " column(s)",
                      source, line_no);
    }
    auto parts = SplitTag(fields[tag]);
    if (!parts) {
      throw DataError("malformed tag '" + fields[tag] + "'", source, line_no);
    }
    if (options.strict && parts->prefix != 'O' &&
        !options.tag_set.contains(parts->type)) {
      throw DataError("unknown tag '" + fields[tag] + "'", source, line_no);
    }
    if (current.tokens.empty()) current_start = line_no;
    current.tokens.push_back(std::move(fields[tok]));
    current.tags.push_back(std::move(fields[tag]));
  }
  flush();
  return out;
}

std::vector<TaggedSentence> ParseConll(const std::filesystem::path& path,
                                       const ConllOptions& options) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file", path.string());
  return ParseConll(in, options, path.string());
}

void WriteConll(std::span<const TaggedSentence> sentences, std::ostream& out) {
  for (const TaggedSentence& s : sentences) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << s.tokens[i] << ' ' << s.tags[i] << '\n';
    }
    out << '\n';
  }
}

void WriteConll(std::span<const TaggedSentence> sentences,
                const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open for writing", path.string());
  WriteConll(sentences, out);
}

std::vector<Span> ExtractSpans(std::span<const std::string> tags) {
  std::vector<Span> spans;
  bool open = false;
  Span cur;
  for (std::size_t i = 0; i < tags.size(); ++i) {
    auto parts = SplitTag(tags[i]);
    if (!parts) throw DataError("malformed tag '" + tags[i] + "'");
    const bool continues =
        parts->prefix == 'I' && open && cur.type == parts->type;
    if (continues) {
      cur.end = i;
      continue;
    }
    if (open) spans.push_back(cur);
    open = parts->prefix != 'O';
    if (open) cur = Span{i, i, std::string(parts->type)};
  }
  if (open) spans.push_back(cur);
  return spans;
}

std::vector<std::string> TagsFromSpans(std::span<const Span> spans,
                                       std::size_t length) {
  std::vector<std::string> tags(length, "O");
  for (const Span& s : spans) {
    if (s.start > s.end || s.end >= length) {
      throw DataError("span [" + std::to_string(s.start) + ", " +
                      std::to_string(s.end) + "] outside sentence of length " +
                      std::to_string(length));
    }
    for (std::size_t i = s.start; i <= s.end; ++i) {
      if (tags[i] != "O") throw DataError("overlapping spans");
      tags[i] = (i == s.start ? "B-" : "I-") + s.type;
    }
  }
  return tags;
}

TaggedSentence IobToBio(const TaggedSentence& s) {
  TaggedSentence out = s;
  std::string_view prev_type;
  char prev_prefix = 'O';
  for (std::size_t i = 0; i < s.tags.size(); ++i) {
    auto parts = SplitTag(s.tags[i]);
    if (!parts) throw DataError("malformed tag '" + s.tags[i] + "'");
    if (parts->prefix == 'I' &&
        (prev_prefix == 'O' || prev_type != parts->type)) {
      out.tags[i] = "B-" + std::string(parts->type);
    }
    prev_prefix = parts->prefix;
    prev_type = parts->type;
  }
  return out;
}

std::vector<SentencePair> LoadPairs(std::istream& in,
                                    const std::string& source) {
  std::vector<SentencePair> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (SplitWhitespace(line).empty()) continue;
    const auto tabs = std::count(line.begin(), line.end(), '\t');
    if (tabs != 1) {
      throw DataError("expected 2 tab-separated columns, found " +
                          std::to_string(tabs + 1),
                      source, line_no);
    }
    const auto tab = line.find('\t');
    SentencePair p;
    p.original = SplitWhitespace(std::string_view(line).substr(0, tab));
    p.back_translation = SplitWhitespace(std::string_view(line).substr(tab + 1));
    if (p.original.empty() || p.back_translation.empty()) {
      throw DataError("empty side in sentence pair", source, line_no);
    }
    p.index = out.size();
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<SentencePair> LoadPairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file", path.string());
  return LoadPairs(in, path.string());
}

CorpusStats ComputeStats(std::span<const TaggedSentence> sentences) {
  CorpusStats stats;
  for (const TaggedSentence& s : sentences) {
    ++stats.sentences;
    stats.tokens += s.size();
    for (const Span& span : ExtractSpans(s.tags)) {
      ++stats.entities;
      ++stats.per_type[span.type];
    }
  }
  return stats;
}

std::string FormatStats(const CorpusStats& stats) {
  std::ostringstream out;
  std::size_t width = 9;
  for (const auto& [type, n] : stats.per_type) {
    width = std::max(width, type.size() + 2);
  }
  auto row = [&](const std::string& name, std::size_t value) {
    out << std::left << std::setw(static_cast<int>(width)) << name
        << std::right << std::setw(10) << value << '\n';
  };
  row("sentences", stats.sentences);
  row("tokens", stats.tokens);
  row("entities", stats.entities);
  for (const auto& [type, n] : stats.per_type) row("  " + type, n);
  out << '\n';
  out << "sentences=" << stats.sentences << '\n';
  out << "tokens=" << stats.tokens << '\n';
  out << "entities=" << stats.entities << '\n';
  for (const auto& [type, n] : stats.per_type) {
    out << "entities." << type << '=' << n << '\n';
  }
  return out.str();
}

}  // namespace wclner
