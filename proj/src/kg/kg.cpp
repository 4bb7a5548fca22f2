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
#include "wclner/kg.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "wclner/error.hpp"

namespace wclner {

namespace {

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

void AppendUnique(std::vector<std::string>& into, const std::string& v) {
  if (std::find(into.begin(), into.end(), v) == into.end()) into.push_back(v);
}

bool StartsUpper(const std::string& token) {
  return !token.empty() && std::isupper(static_cast<unsigned char>(token[0]));
}

}  // namespace

TypeMap::TypeMap(std::map<std::string, std::string> entries, Policy policy)
    : entries_(std::move(entries)), policy_(policy) {}

TypeMap TypeMap::Conll2003Default() {
  return TypeMap({{"Person", "PER"},
                  {"Place", "LOC"},
                  {"Organisation", "ORG"},
                  {"Organization", "ORG"}});
}

TypeMap TypeMap::Parse(std::istream& in, const std::string& source) {
  std::map<std::string, std::string> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = Trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto tab = t.find('\t');
    if (tab == std::string::npos) {
      throw DataError("type map lines need 'kg-type<TAB>dataset-type'", source,
                      line_no);
    }
    const std::string from = Trim(t.substr(0, tab));
    const std::string to = Trim(t.substr(tab + 1));
    if (from.empty() || to.empty() || to.find('\t') != std::string::npos) {
      throw DataError("malformed type map entry", source, line_no);
    }
    auto [it, inserted] = entries.emplace(from, to);
    if (!inserted && it->second != to) {
      throw DataError("type '" + from + "' mapped twice", source, line_no);
    }
  }
  return TypeMap(std::move(entries));
}

TypeMap TypeMap::Load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open type map", path.string());
  return Parse(in, path.string());
}

std::optional<std::string> TypeMap::Map(const std::string& kg_type) const {
  auto it = entries_.find(kg_type);
  if (it != entries_.end()) return it->second;
  const auto cut = kg_type.find_last_of("/#:");
  if (cut != std::string::npos) {
    it = entries_.find(kg_type.substr(cut + 1));
    if (it != entries_.end()) return it->second;
  }
  return std::nullopt;
}

TypeMap::Policy ParseTypePolicy(const std::string& text) {
  if (text == "drop") return TypeMap::Policy::kDrop;
  if (text == "error") return TypeMap::Policy::kError;
  throw ConfigError("unknown type policy '" + text + "' (drop, error)");
}

void KgIndex::Add(const std::string& surface, const std::string& type) {
  const std::vector<std::string> tokens = SplitWhitespace(surface);
  if (tokens.empty()) throw DataError("empty surface form in knowledge graph");
  AppendUnique(entries_[SurfaceKey(tokens)], type);
  max_tokens_ = std::max(max_tokens_, tokens.size());
}

const std::vector<std::string>* KgIndex::Lookup(const std::string& surface) const {
  auto it = entries_.find(surface);
  return it == entries_.end() ? nullptr : &it->second;
}

KgIndex KgIndex::Parse(std::istream& in, const TypeMap& types, bool strict,
                       const std::string& source) {
  KgIndex index;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (Trim(line).empty()) continue;
    const auto tab = line.find('\t');
    const bool ok = tab != std::string::npos &&
                    line.find('\t', tab + 1) == std::string::npos &&
                    !Trim(line.substr(0, tab)).empty() &&
                    !Trim(line.substr(tab + 1)).empty();
    if (!ok) {
      if (strict) {
        throw DataError("snapshot lines need 'surface<TAB>type'", source,
                        line_no);
      }
      ++index.stats_.skipped_lines;
      continue;
    }
    const std::string label = Trim(line.substr(tab + 1));
    const std::optional<std::string> mapped = types.Map(label);
    if (!mapped) {
      if (types.policy() == TypeMap::Policy::kError) {
        throw DataError("type '" + label + "' has no mapping", source, line_no);
      }
      ++index.stats_.dropped_types;
      continue;
    }
    index.Add(line.substr(0, tab), *mapped);
    ++index.stats_.records;
  }
  return index;
}

KgIndex KgIndex::Load(const std::filesystem::path& path, const TypeMap& types,
                      bool strict) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open knowledge-graph snapshot", path.string());
  return Parse(in, types, strict, path.string());
}

std::string SurfaceKey(std::span<const std::string> tokens) {
  return JoinTokens(tokens, 0, tokens.size());
}

bool IsAcronym(const std::string& word) {
  if (word.size() < 2) return false;
  return std::all_of(word.begin(), word.end(), [](unsigned char c) {
    return c >= 'A' && c <= 'Z';
  });
}

std::vector<std::string> expand_acronym(
    const std::string& word, std::span<const std::vector<std::string>> sentences) {
  std::vector<std::string> out;
  if (!IsAcronym(word)) return out;
  const std::size_t n = word.size();
  for (const auto& s : sentences) {
    for (std::size_t i = 0; i + n <= s.size(); ++i) {
      bool match = true;
      for (std::size_t k = 0; k < n && match; ++k) {
        const std::string& tok = s[i + k];
        match = !tok.empty() &&
                std::toupper(static_cast<unsigned char>(tok[0])) == word[k];
      }
      if (match) {
        AppendUnique(out, SurfaceKey(std::span(s).subspan(i, n)));
      }
    }
  }
  return out;
}

std::vector<std::string> enumerate_subphrases(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  const std::size_t n = tokens.size();
  out.reserve(n * (n + 1) / 2);
  for (std::size_t len = 1; len <= n; ++len) {
    for (std::size_t i = 0; i + len <= n; ++i) {
      out.push_back(SurfaceKey(tokens.subspan(i, len)));
    }
  }
  return out;
}

PotentialEntitySet build_pe(std::span<const std::vector<std::string>> sentences,
                            const KgLookup& lookup, const PeOptions& options) {
  PotentialEntitySet pe;
  std::map<std::string, std::vector<std::string>> memo;
  auto resolve = [&](const std::string& surface) -> const std::vector<std::string>& {
    auto it = memo.find(surface);
    if (it != memo.end()) return it->second;
    std::vector<std::string> kept;
    for (const std::string& type : lookup(surface)) {
      if (options.tags && !options.tags->contains(type)) {
        if (options.policy == TypeMap::Policy::kError) {
          throw ConfigError("knowledge-graph type '" + type + "' for '" +
                            surface + "' is not in the tag set");
        }
        continue;
      }
      AppendUnique(kept, type);
    }
    return memo.emplace(surface, std::move(kept)).first->second;
  };
  auto add = [&](const std::string& surface, const std::vector<std::string>& types) {
    if (types.empty()) return;
    auto& slot = pe[surface];
    for (const std::string& t : types) AppendUnique(slot, t);
  };

  std::set<std::string> acronyms_done;
  for (const auto& s : sentences) {
    for (const std::string& word : s) {
      if (!IsAcronym(word) || !acronyms_done.insert(word).second) continue;
      const std::vector<std::string> own = resolve(word);
      add(word, own);
      for (const std::string& phrase : expand_acronym(word, sentences)) {
        const std::vector<std::string> tokens = SplitWhitespace(phrase);
        for (const std::string& sub : enumerate_subphrases(tokens)) {
          add(sub, resolve(sub));
        }
        // An acronym absent from the graph takes the type of its expansion.
        if (own.empty()) add(word, resolve(phrase));
      }
    }
    for (std::size_t i = 0; i < s.size(); ++i) {
      for (std::size_t len = 1; len <= options.max_window && i + len <= s.size();
           ++len) {
        if (!StartsUpper(s[i + len - 1])) break;
        const std::string surface = SurfaceKey(std::span(s).subspan(i, len));
        add(surface, resolve(surface));
      }
    }
  }
  return pe;
}

PotentialEntitySet build_pe(std::span<const std::vector<std::string>> sentences,
                            const KgIndex& index, const PeOptions& options) {
  return build_pe(
      sentences,
      [&index](const std::string& surface) {
        const auto* hit = index.Lookup(surface);
        return hit ? *hit : std::vector<std::string>{};
      },
      options);
}

std::vector<TaggedSentence> modify_entities(
    std::span<const TaggedSentence> predicted, const PotentialEntitySet& pe,
    std::vector<Correction>* corrections) {
  std::vector<TaggedSentence> out(predicted.begin(), predicted.end());
  if (pe.empty()) return out;
  std::size_t longest = 0;
  for (const auto& [surface, types] : pe) {
    longest = std::max(longest, SplitWhitespace(surface).size());
  }

  for (std::size_t si = 0; si < out.size(); ++si) {
    TaggedSentence& s = out[si];
    std::size_t i = 0;
    while (i < s.size()) {
      const PotentialEntitySet::value_type* match = nullptr;
      std::size_t len = std::min(longest, s.size() - i);
      for (; len > 0; --len) {
        auto it = pe.find(SurfaceKey(std::span(s.tokens).subspan(i, len)));
        if (it != pe.end() && !it->second.empty()) {
          match = &*it;
          break;
        }
      }
      if (!match) {
        ++i;
        continue;
      }
      const std::vector<std::string>& types = match->second;
      bool consistent = false;
      for (const std::string& type : types) {
        consistent = true;
        for (std::size_t k = i; k < i + len && consistent; ++k) {
          consistent = s.tags[k] == "B-" + type || s.tags[k] == "I-" + type;
        }
        if (consistent) break;
      }
      if (!consistent) {
        const std::string& type = types.front();
        s.tags[i] = "B-" + type;
        for (std::size_t k = i + 1; k < i + len; ++k) s.tags[k] = "I-" + type;
        if (i + len < s.size() && s.tags[i + len].rfind("I-", 0) == 0) {
          s.tags[i + len][0] = 'B';
        }
        if (corrections) {
          corrections->push_back({si, {i, i + len - 1, type}, match->first});
        }
      }
      i += len;
    }
  }
  return out;
}

std::string UrlEncode(const std::string& text) {
  static const char* kHex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::vector<std::string> ParseLookupResponse(const std::string& body) {
  std::vector<std::string> types;
  const nlohmann::json doc = nlohmann::json::parse(body, nullptr, false);
  if (doc.is_discarded()) return types;
  auto take = [&](const nlohmann::json& list) {
    if (list.is_string()) {
      AppendUnique(types, list.get<std::string>());
    } else if (list.is_array()) {
      for (const auto& v : list) {
        if (v.is_string()) AppendUnique(types, v.get<std::string>());
      }
    }
  };
  if (doc.is_array()) {
    take(doc);
  } else if (doc.is_object()) {
    if (doc.contains("types")) take(doc["types"]);
    if (doc.contains("docs") && doc["docs"].is_array()) {
      for (const auto& d : doc["docs"]) {
        if (!d.is_object()) continue;
        if (d.contains("type")) take(d["type"]);
        if (d.contains("typeName")) take(d["typeName"]);
      }
    }
  }
  return types;
}

RemoteLookup::RemoteLookup(std::string endpoint, std::filesystem::path cache_path,
                           TypeMap types)
    : endpoint_(std::move(endpoint)),
      cache_path_(std::move(cache_path)),
      types_(std::move(types)) {
  if (cache_path_.empty()) return;
  std::ifstream in(cache_path_);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError("cache lines need 'surface<TAB>types'",
                      cache_path_.string(), line_no);
    }
    std::vector<std::string> labels;
    std::stringstream list(line.substr(tab + 1));
    std::string label;
    while (std::getline(list, label, ',')) {
      if (!label.empty()) labels.push_back(label);
    }
    cache_[line.substr(0, tab)] = std::move(labels);
  }
}

void RemoteLookup::Append(const std::string& surface,
                          const std::vector<std::string>& types) {
  if (cache_path_.empty()) return;
  std::ofstream out(cache_path_, std::ios::app);
  if (!out) {
    ++warnings_;
    return;
  }
  out << surface << '\t';
  for (std::size_t i = 0; i < types.size(); ++i) {
    out << (i ? "," : "") << types[i];
  }
  out << '\n';
}

std::vector<std::string> RemoteLookup::RawTypes(const std::string& surface) {
  std::lock_guard lock(mutex_);
  auto it = cache_.find(surface);
  if (it != cache_.end()) return it->second;

  // Split "scheme://host[:port]" from the path prefix.
  const auto scheme_end = endpoint_.find("://");
  const auto path_start = endpoint_.find(
      '/', scheme_end == std::string::npos ? 0 : scheme_end + 3);
  const std::string host = endpoint_.substr(0, path_start);
  const std::string path = path_start == std::string::npos
                               ? "/" + UrlEncode(surface)
                               : endpoint_.substr(path_start) + UrlEncode(surface);
  ++network_calls_;
  try {
    httplib::Client client(host);
    client.set_connection_timeout(5);
    client.set_read_timeout(10);
    const httplib::Result res = client.Get(path);
    if (!res || res->status != 200) {
      ++warnings_;
      return {};
    }
    std::vector<std::string> types = ParseLookupResponse(res->body);
    types.erase(std::remove_if(types.begin(), types.end(),
                               [](const std::string& t) {
                                 return t.find_first_of(",\t\n") !=
                                        std::string::npos;
                               }),
                types.end());
    cache_[surface] = types;
    Append(surface, types);
    return types;
  } catch (const std::exception&) {
    ++warnings_;
    return {};
  }
}

std::vector<std::string> RemoteLookup::Lookup(const std::string& surface) {
  std::vector<std::string> mapped;
  for (const std::string& label : RawTypes(surface)) {
    if (auto t = types_.Map(label)) AppendUnique(mapped, *t);
  }
  return mapped;
}

}  // namespace wclner
