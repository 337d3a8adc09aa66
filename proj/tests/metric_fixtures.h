// metric_fixtures.h

// Copyright 2026 The seqcritic Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Oracle values from tests/oracles/metric_oracle.py.

#ifndef SEQCRITIC_TESTS_METRIC_FIXTURES_H_
#define SEQCRITIC_TESTS_METRIC_FIXTURES_H_

#include <cmath>
#include <string>
#include <vector>

#include "seqcritic/metrics.h"

namespace seqcritic::testing {

using Refs = std::vector<TokenSequence>;

inline Refs Seqs(std::initializer_list<std::vector<Token>> seqs) {
  Refs out;
  for (const auto& s : seqs) out.emplace_back(s);
  return out;
}

inline const Refs kRefsA = Seqs({{3, 4, 5}, {3, 4, 6}});
inline const Refs kRefsB = Seqs({{7, 8}, {3, 7, 9}});
inline const Refs kRefsC = Seqs({{5, 6, 7, 8}, {9, 3}});

inline CorpusIdf Idf2() { return FitIdf(std::vector<Refs>{kRefsA, kRefsB}); }
inline CorpusIdf Idf3() { return FitIdf(std::vector<Refs>{kRefsA, kRefsB, kRefsC}); }

struct FixtureValue {
  std::string name;
  double got;
  double want;
};

inline std::vector<FixtureValue> CiderFixtures() {
  const CorpusIdf idf2 = Idf2(), idf3 = Idf3();
  const Refs single = Seqs({{3, 4, 5}});
  const CorpusIdf idf1 = FitIdf(std::vector<Refs>{single});
  return {
      {"cider [3,4,5] | A, idf2", Cider(TokenSequence({3, 4, 5}), kRefsA, idf2), 5.0000000000000009},
      {"cider [3,4] | A, idf2", Cider(TokenSequence({3, 4}), kRefsA, idf2), 3.5355339059327378},
      {"cider [7,8,3] | B, idf2", Cider(TokenSequence({7, 8, 3}), kRefsB, idf2), 2.7588834764831849},
      {"cider [3,4,6,7,8,9] | A, idf3", Cider(TokenSequence({3, 4, 6, 7, 8, 9}), kRefsA, idf3),
       3.9443047550199983},
      {"cider [5,6,5,6] | C, idf3", Cider(TokenSequence({5, 6, 5, 6}), kRefsC, idf3),
       0.82441647076554014},
      {"cider [3,4,5,10] | A, idf3", Cider(TokenSequence({3, 4, 5, 10}), kRefsA, idf3),
       4.1287814497631752},
      // One image: every idf weight is log(1) = 0.
      {"cider single-image corpus", Cider(TokenSequence({3, 4, 5}), single, idf1), 0.0},
  };
}

inline std::vector<FixtureValue> BleuFixtures() {
  struct Case {
    std::string name;
    std::vector<Token> cand;
    Refs refs;
    std::vector<double> want;
  };
  const std::vector<Case> cases = {
      {"bleu two refs", {3, 4, 5, 6, 3, 4, 7, 8}, Seqs({{3, 4, 5, 6, 7, 8}, {9, 3, 4, 7, 8, 5, 6}}),
       {0.75, 0.7319250547113999, 0.70949170598519196, 0.61478815295126443}},
      {"bleu short candidate", {3, 4, 5}, Seqs({{3, 4, 5, 6, 7}}),
       {0.51341711903259202, 0.51341711903259202, 0.51341711903259202, 0.0}},
      {"bleu clipped repeats", {3, 3, 3, 3}, Seqs({{3, 4, 3, 5}}), {0.5, 0.0, 0.0, 0.0}},
      {"bleu long candidate", {3, 4, 5, 6, 7, 8, 9}, Seqs({{3, 4, 5}, {4, 5, 6, 7}}),
       {0.7142857142857143, 0.69006555934235425, 0.6586337560083495, 0.51697315395717058}},
      // Equally close reference lengths: the shorter one sets the penalty.
      {"bleu length tie", {3, 4, 5, 6}, Seqs({{3, 4, 5}, {3, 4, 5, 6, 7}}), {1.0, 1.0, 1.0, 1.0}},
  };
  std::vector<FixtureValue> out;
  for (const Case& c : cases) {
    const auto got = Bleu(TokenSequence(c.cand), c.refs);
    for (std::size_t k = 0; k < c.want.size(); ++k)
      out.push_back({c.name + " BLEU-" + std::to_string(k + 1),
                     k < got.size() ? got[k] : -1.0, c.want[k]});
  }
  return out;
}

inline double RelativeError(double got, double want) {
  if (want == 0.0) return got == 0.0 ? 0.0 : std::abs(got);
  return std::abs(got - want) / std::abs(want);
}

}  // namespace seqcritic::testing

#endif  // SEQCRITIC_TESTS_METRIC_FIXTURES_H_
