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
#include "wclner/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "wclner/error.hpp"

namespace wclner {

EvalCounts& EvalCounts::operator+=(const EvalCounts& o) {
  overall += o.overall;
  for (const auto& [type, c] : o.per_type) per_type[type] += c;
  tokens += o.tokens;
  correct_tokens += o.correct_tokens;
  return *this;
}

EvalCounts count_matches(std::span<const TaggedSentence> gold,
                         std::span<const TaggedSentence> pred) {
  if (gold.size() != pred.size()) {
    throw DataError("gold has " + std::to_string(gold.size()) +
                    " sentences, predictions have " +
                    std::to_string(pred.size()));
  }
  EvalCounts counts;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const TaggedSentence& g = gold[i];
    const TaggedSentence& p = pred[i];
    if (g.tokens != p.tokens || g.tags.size() != g.tokens.size() ||
        p.tags.size() != p.tokens.size()) {
      throw DataError("sentence " + std::to_string(i + 1) +
                      " does not align between gold and predictions");
    }
    counts.tokens += g.size();
    for (std::size_t t = 0; t < g.size(); ++t) {
      if (g.tags[t] == p.tags[t]) ++counts.correct_tokens;
    }
    // Both lists come out sorted by start, so a merge finds the overlap.
    const std::vector<Span> gs = ExtractSpans(g.tags);
    const std::vector<Span> ps = ExtractSpans(p.tags);
    std::vector<Span> common;
    std::set_intersection(gs.begin(), gs.end(), ps.begin(), ps.end(),
                          std::back_inserter(common));
    for (const Span& s : common) ++counts.per_type[s.type].tp;
    for (const Span& s : gs) ++counts.per_type[s.type].fn;
    for (const Span& s : ps) ++counts.per_type[s.type].fp;
    for (const Span& s : common) {
      --counts.per_type[s.type].fn;
      --counts.per_type[s.type].fp;
    }
  }
  for (const auto& [type, c] : counts.per_type) counts.overall += c;
  return counts;
}

double f1_score(double precision, double recall) {
  const double d = precision + recall;
  return d > 0.0 ? 2.0 * precision * recall / d : 0.0;
}

Prf prf(const MatchCounts& c) {
  Prf r;
  if (c.tp + c.fp > 0) {
    r.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
  }
  if (c.tp + c.fn > 0) {
    r.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
  }
  r.f1 = f1_score(r.precision, r.recall);
  return r;
}

double RoundHalfUp2(double value) {
  // The epsilon absorbs binary representation error, e.g. 92.825 stored as
  // 92.82499999...
  return std::floor(value * 100.0 + 0.5 + 1e-9) / 100.0;
}

namespace {

std::string Percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%6.2f", RoundHalfUp2(fraction * 100.0));
  return buf;
}

std::string Full(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string FormatReport(const EvalCounts& counts) {
  const MatchCounts& o = counts.overall;
  const Prf total = prf(o);
  const double accuracy =
      counts.tokens ? static_cast<double>(counts.correct_tokens) /
                          static_cast<double>(counts.tokens)
                    : 0.0;
  std::ostringstream out;
  out << "processed " << counts.tokens << " tokens with " << o.tp + o.fn
      << " phrases; found: " << o.tp + o.fp << " phrases; correct: " << o.tp
      << ".\n";
  out << "accuracy: " << Percent(accuracy) << "%; precision: "
      << Percent(total.precision) << "%; recall: " << Percent(total.recall)
      << "%; FB1: " << Percent(total.f1) << "\n";
  for (const auto& [type, c] : counts.per_type) {
    const Prf r = prf(c);
    char label[64];
    std::snprintf(label, sizeof label, "%17s", type.c_str());
    out << label << ": precision: " << Percent(r.precision)
        << "%; recall: " << Percent(r.recall) << "%; FB1: " << Percent(r.f1)
        << "  " << c.tp + c.fp << "\n";
  }
  out << "\n";
  out << "tokens=" << counts.tokens << "\n";
  out << "accuracy=" << Full(accuracy) << "\n";
  out << "tp=" << o.tp << "\nfp=" << o.fp << "\nfn=" << o.fn << "\n";
  out << "precision=" << Full(total.precision) << "\n";
  out << "recall=" << Full(total.recall) << "\n";
  out << "f1=" << Full(total.f1) << "\n";
  for (const auto& [type, c] : counts.per_type) {
    const Prf r = prf(c);
    out << "tp." << type << "=" << c.tp << "\n";
    out << "fp." << type << "=" << c.fp << "\n";
    out << "fn." << type << "=" << c.fn << "\n";
    out << "precision." << type << "=" << Full(r.precision) << "\n";
    out << "recall." << type << "=" << Full(r.recall) << "\n";
    out << "f1." << type << "=" << Full(r.f1) << "\n";
  }
  return out.str();
}

}  // namespace wclner
