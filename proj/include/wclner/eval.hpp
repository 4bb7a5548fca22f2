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
#ifndef WCLNER_EVAL_HPP_
#define WCLNER_EVAL_HPP_

#include <cstddef>
#include <map>
#include <span>
#include <string>

#include "wclner/corpus.hpp"

// Exact-match span scoring in the style of conlleval.
namespace wclner {

struct MatchCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  MatchCounts& operator+=(const MatchCounts& o) {
    tp += o.tp;
    fp += o.fp;
    fn += o.fn;
    return *this;
  }
  friend bool operator==(const MatchCounts&, const MatchCounts&) = default;
};

struct EvalCounts {
  MatchCounts overall;
  std::map<std::string, MatchCounts> per_type;
  std::size_t tokens = 0;
  std::size_t correct_tokens = 0;

  EvalCounts& operator+=(const EvalCounts& o);
  friend bool operator==(const EvalCounts&, const EvalCounts&) = default;
};

// Fractions in [0, 1]. Zero denominators give 0.
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// Spans match only when start, end and type agree. Sentences must align
// token for token.
EvalCounts count_matches(std::span<const TaggedSentence> gold,
                         std::span<const TaggedSentence> pred);

Prf prf(const MatchCounts& counts);
// F1 from precision and recall alone: 2PR / (P + R), or 0 when both are 0.
double f1_score(double precision, double recall);

// conlleval-style text block (percentages, two decimals, half-up) followed by
// key=value lines at full precision.
std::string FormatReport(const EvalCounts& counts);

// Rounds a percentage half-up to two decimals.
double RoundHalfUp2(double value);

}  // namespace wclner

#endif  // WCLNER_EVAL_HPP_
