// seqcritic/metrics.h

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

#ifndef SEQCRITIC_METRICS_H_
#define SEQCRITIC_METRICS_H_

// Exact n-gram metrics over integer token sequences: CIDEr (the reward and
// the model-selection metric) and BLEU (evaluation only).
//
// CIDEr here is the plain consensus metric, not CIDEr-D: term frequencies
// are raw counts weighted by idf = log(N / max(1, df)), the per-order
// similarity against each reference is
//     sum_g min(c_g, r_g) * r_g / (|c| |r|)
// with 0/0 taken as 0, averaged over references and over orders 1..4, and
// scaled by 10. No gaussian length penalty.

#include <array>
#include <cstdint>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "seqcritic/token.h"

namespace seqcritic {

inline constexpr int kMaxNGramOrder = 4;

// A sequence to be scored. When `includes_eos` is false a trailing EOS token
// is dropped before n-gram counting; when true it counts like a word.
struct TokenSequence {
  std::vector<Token> tokens;
  bool includes_eos = false;

  TokenSequence() = default;
  TokenSequence(std::vector<Token> t, bool with_eos = false)
      : tokens(std::move(t)), includes_eos(with_eos) {}

  std::span<const Token> counted() const;
};

using NGramKey = std::uint64_t;

// Packs up to four tokens into one key. Orders live in separate tables, so
// keys of different orders never need to be distinguished.
NGramKey PackNGram(std::span<const Token> gram);

// Per-order n-gram counts, each order sorted by key.
struct NGramStats {
  std::array<std::vector<std::pair<NGramKey, int>>, kMaxNGramOrder> counts;

  static NGramStats From(std::span<const Token> tokens);
  int total(int order) const;  // order is 1-based
};

class CorpusIdf {
 public:
  CorpusIdf() = default;

  // Document frequency of an n-gram; 0 when never seen.
  int df(int order, NGramKey key) const;
  double idf(int order, NGramKey key) const;
  int num_images() const { return num_images_; }
  double log_num_images() const { return log_num_images_; }

  const std::unordered_map<NGramKey, int>& table(int order) const {
    return df_[order - 1];
  }

 private:
  friend CorpusIdf FitIdf(
      std::span<const std::vector<TokenSequence>> reference_sets);

  std::array<std::unordered_map<NGramKey, int>, kMaxNGramOrder> df_;
  int num_images_ = 0;
  double log_num_images_ = 0.0;
};

// df(g) = number of reference sets in which g occurs in at least one
// reference. Throws ConfigError on an empty corpus or an empty set.
CorpusIdf FitIdf(std::span<const std::vector<TokenSequence>> reference_sets);

// TF-IDF vectors of a reference set, computed once and reused for every
// candidate scored against that set. Keeps a pointer to `idf`, which must
// outlive it.
class CiderReferences {
 public:
  CiderReferences() = default;
  CiderReferences(std::span<const TokenSequence> refs, const CorpusIdf& idf);

  double Score(const TokenSequence& candidate) const;
  std::size_t size() const { return refs_.size(); }

 private:
  struct Vec {
    std::vector<std::pair<NGramKey, double>> entries;  // sorted by key
    double norm = 0.0;
  };
  using Orders = std::array<Vec, kMaxNGramOrder>;

  static Orders Weigh(const NGramStats& stats, const CorpusIdf& idf);

  const CorpusIdf* idf_ = nullptr;
  std::vector<Orders> refs_;
};

double Cider(const TokenSequence& candidate,
             std::span<const TokenSequence> refs, const CorpusIdf& idf);

// Sentence BLEU-1..max_order: clipped n-gram precision, geometric mean,
// brevity penalty against the closest reference length (ties go to the
// shorter one). No smoothing.
std::vector<double> Bleu(const TokenSequence& candidate,
                         std::span<const TokenSequence> refs,
                         int max_order = kMaxNGramOrder);

// Corpus-level BLEU: clipped counts and lengths are summed over sentences
// before the precision and brevity penalty are formed.
class BleuAccumulator {
 public:
  explicit BleuAccumulator(int max_order = kMaxNGramOrder);
  void Add(const TokenSequence& candidate,
           std::span<const TokenSequence> refs);
  std::vector<double> Scores() const;

 private:
  int max_order_;
  std::vector<double> clipped_;
  std::vector<double> total_;
  double candidate_length_ = 0.0;
  double reference_length_ = 0.0;
};

// The RL reward. `tokens` is a generated sequence that may end in EOS. With
// `with_eos` the EOS token takes part in n-gram matching on both sides: it
// is kept on the candidate and appended to every reference. `idf` must
// outlive the reward.
class CiderReward {
 public:
  CiderReward(std::span<const std::vector<Token>> references,
              const CorpusIdf& idf);

  double operator()(std::span<const Token> tokens, bool with_eos) const;

 private:
  CiderReferences plain_;
  CiderReferences with_eos_;
};

double Reward(std::span<const Token> tokens,
              std::span<const std::vector<Token>> references,
              const CorpusIdf& idf, bool with_eos);

// Reference sets with EOS appended to every reference; this is what
// FitIdf must see for the with-EOS reward's idf table to cover EOS n-grams.
std::vector<TokenSequence> WithEosReferences(
    std::span<const std::vector<Token>> references);

}  // namespace seqcritic

#endif  // SEQCRITIC_METRICS_H_
