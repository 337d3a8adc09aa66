// metrics_test.cc

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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "seqcritic/errors.h"
#include "metric_fixtures.h"
#include "seqcritic/metrics.h"

// Expected values come from tests/oracles/metric_oracle.py, an independent
// dict-counting implementation. Token ids: 3=a 4=b 5=c 6=d 7=e 8=f 9=g.

namespace seqcritic {
namespace {

using testing::Refs;
using testing::Seqs;
const Refs& kA = testing::kRefsA;
using testing::Idf2;
using testing::Idf3;

void CheckRel(double got, double want) {
  if (want == 0.0) {
    CHECK(got == 0.0);
  } else {
    CHECK(std::abs(got - want) / std::abs(want) < 1e-9);
  }
}

void CheckBleu(const std::vector<double>& got, const std::vector<double>& want) {
  REQUIRE(got.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CheckRel(got[i], want[i]);
}

TEST_SUITE("metrics") {

TEST_CASE("cider matches oracle fixtures") {
  const auto fixtures = testing::CiderFixtures();
  CHECK(fixtures.size() >= 6);
  for (const auto& f : fixtures) {
    CAPTURE(f.name);
    CheckRel(f.got, f.want);
  }
}

TEST_CASE("cider of a single-image corpus is zero") {
  // Every n-gram has df = N = 1, so every idf weight is log(1) = 0.
  const Refs refs = Seqs({{3, 4, 5}});
  const auto idf = FitIdf(std::vector<Refs>{refs});
  CHECK(idf.idf(1, PackNGram(std::vector<Token>{3})) == 0.0);
  CHECK(Cider(TokenSequence({3, 4, 5}), refs, idf) == 0.0);
}

TEST_CASE("cider hand-checked per-order values") {
  // [3,4,5] vs A under idf2: order scores 0.75, 0.75, 0.5, 0 -> 10 * 2 / 4.
  CheckRel(Cider(TokenSequence({3, 4, 5}), kA, Idf2()), 5.0);
}

TEST_CASE("cider degenerate inputs score zero") {
  const auto idf = Idf2();
  CHECK(Cider(TokenSequence(std::vector<Token>{}), kA, idf) == 0.0);
  CHECK(Cider(TokenSequence({10, 11}), kA, idf) == 0.0);
}

TEST_CASE("cider references are reusable across candidates") {
  const auto idf = Idf3();
  const CiderReferences refs(kA, idf);
  CHECK(refs.Score(TokenSequence({3, 4, 6, 7, 8, 9})) == Cider(TokenSequence({3, 4, 6, 7, 8, 9}), kA, idf));
  CHECK(refs.Score(TokenSequence({3, 4, 5, 10})) == Cider(TokenSequence({3, 4, 5, 10}), kA, idf));
}

TEST_CASE("fit idf rejects empty input") {
  CHECK_THROWS_AS(FitIdf(std::vector<Refs>{}), ConfigError);
  CHECK_THROWS_AS(FitIdf(std::vector<Refs>{Refs{}}), ConfigError);
}

TEST_CASE("bleu matches oracle fixtures") {
  const auto fixtures = testing::BleuFixtures();
  CHECK(fixtures.size() == 5 * 4);
  for (const auto& f : fixtures) {
    CAPTURE(f.name);
    CheckRel(f.got, f.want);
  }
}

TEST_CASE("bleu of a reference against itself is one") {
  const Refs refs = Seqs({{3, 4, 5, 6, 7}});
  CheckBleu(Bleu(refs[0], refs), {1.0, 1.0, 1.0, 1.0});
}

TEST_CASE("bleu of an empty candidate is zero") {
  CheckBleu(Bleu(TokenSequence(std::vector<Token>{}), kA), {0.0, 0.0, 0.0, 0.0});
}

TEST_CASE("corpus bleu of one sentence equals sentence bleu") {
  BleuAccumulator acc;
  const Refs refs = Seqs({{3, 4, 5, 6, 7, 8}, {9, 3, 4, 7, 8, 5, 6}});
  acc.Add(TokenSequence({3, 4, 5, 6, 3, 4, 7, 8}), refs);
  CheckBleu(acc.Scores(), Bleu(TokenSequence({3, 4, 5, 6, 3, 4, 7, 8}), refs));
}

TEST_CASE("corpus bleu sums counts before dividing") {
  BleuAccumulator acc(1);
  acc.Add(TokenSequence({3, 3, 3, 3}), Seqs({{3, 4, 3, 5}}));  // 2 of 4
  acc.Add(TokenSequence({3, 4}), Seqs({{3, 4}}));              // 2 of 2
  CheckRel(acc.Scores()[0], 4.0 / 6.0);
}

TEST_CASE("trailing eos is not counted unless requested") {
  const auto idf = Idf2();
  CHECK(Cider(TokenSequence({3, 4, 5, kEos}), kA, idf) == Cider(TokenSequence({3, 4, 5}), kA, idf));
  CHECK(TokenSequence({3, 4, kEos}, true).counted().size() == 3);
}

TEST_CASE("with-eos reward rewards correct termination") {
  const std::vector<std::vector<Token>> refs = {{3, 4, 5}, {3, 4, 6}};
  std::vector<Refs> corpus;
  corpus.push_back(WithEosReferences(refs));
  for (const auto& r : refs) corpus.back().emplace_back(r);
  corpus.push_back(WithEosReferences(std::vector<std::vector<Token>>{{7, 8}}));
  const auto idf = FitIdf(corpus);
  const CiderReward reward(refs, idf);
  const std::vector<Token> complete = {3, 4, 5, kEos};
  const std::vector<Token> cut = {3, 4, kEos};
  // EOS right after a reference ending matches an extra n-gram.
  CHECK(reward(complete, true) > reward(cut, true));
  CHECK(reward(complete, false) == Cider(TokenSequence({3, 4, 5}), Seqs({{3, 4, 5}, {3, 4, 6}}), idf));
  // A truncated sequence has no EOS to match and scores as plain CIDEr.
  const std::vector<Token> truncated = {3, 4, 5};
  CHECK(reward(truncated, true) == reward(truncated, false));
}

}  // TEST_SUITE

}  // namespace
}  // namespace seqcritic
