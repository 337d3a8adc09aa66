// metrics.cc

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

#include "seqcritic/metrics.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "seqcritic/errors.h"

namespace seqcritic {

std::span<const Token> TokenSequence::counted() const {
  std::span<const Token> s(tokens);
  if (!includes_eos && !s.empty() && s.back() == kEos) s = s.first(s.size() - 1);
  return s;
}

NGramKey PackNGram(std::span<const Token> gram) {
  NGramKey key = 0;
  for (Token t : gram) {
    if (t < 0 || t >= 0xffff)
      throw UsageError("PackNGram: token id out of range for n-gram key");
    key = (key << 16) | static_cast<NGramKey>(t + 1);
  }
  return key;
}

NGramStats NGramStats::From(std::span<const Token> tokens) {
  NGramStats stats;
  const int len = static_cast<int>(tokens.size());
  for (int k = 1; k <= kMaxNGramOrder; ++k) {
    std::vector<NGramKey> keys;
    for (int i = 0; i + k <= len; ++i)
      keys.push_back(PackNGram(tokens.subspan(i, k)));
    std::sort(keys.begin(), keys.end());
    auto& out = stats.counts[k - 1];
    for (std::size_t i = 0; i < keys.size();) {
      std::size_t j = i;
      while (j < keys.size() && keys[j] == keys[i]) ++j;
      out.emplace_back(keys[i], static_cast<int>(j - i));
      i = j;
    }
  }
  return stats;
}

int NGramStats::total(int order) const {
  int sum = 0;
  for (const auto& [key, count] : counts[order - 1]) sum += count;
  return sum;
}

int CorpusIdf::df(int order, NGramKey key) const {
  const auto& table = df_[order - 1];
  auto it = table.find(key);
  return it == table.end() ? 0 : it->second;
}

double CorpusIdf::idf(int order, NGramKey key) const {
  return log_num_images_ - std::log(std::max(1, df(order, key)));
}

CorpusIdf FitIdf(std::span<const std::vector<TokenSequence>> reference_sets) {
  if (reference_sets.empty())
    throw ConfigError("FitIdf: empty reference corpus");
  CorpusIdf idf;
  for (const auto& refs : reference_sets) {
    if (refs.empty()) throw ConfigError("FitIdf: reference set with no references");
    std::array<std::set<NGramKey>, kMaxNGramOrder> seen;
    for (const auto& ref : refs) {
      NGramStats stats = NGramStats::From(ref.counted());
      for (int k = 0; k < kMaxNGramOrder; ++k)
        for (const auto& [key, count] : stats.counts[k]) seen[k].insert(key);
    }
    for (int k = 0; k < kMaxNGramOrder; ++k)
      for (NGramKey key : seen[k]) ++idf.df_[k][key];
  }
  idf.num_images_ = static_cast<int>(reference_sets.size());
  idf.log_num_images_ = std::log(static_cast<double>(idf.num_images_));
  return idf;
}

CiderReferences::Orders CiderReferences::Weigh(const NGramStats& stats,
                                               const CorpusIdf& idf) {
  Orders out;
  for (int k = 0; k < kMaxNGramOrder; ++k) {
    double sq = 0.0;
    for (const auto& [key, count] : stats.counts[k]) {
      double w = count * idf.idf(k + 1, key);
      out[k].entries.emplace_back(key, w);
      sq += w * w;
    }
    out[k].norm = std::sqrt(sq);
  }
  return out;
}

CiderReferences::CiderReferences(std::span<const TokenSequence> refs,
                                 const CorpusIdf& idf)
    : idf_(&idf) {
  refs_.reserve(refs.size());
  for (const auto& r : refs) refs_.push_back(Weigh(NGramStats::From(r.counted()), idf));
}

double CiderReferences::Score(const TokenSequence& candidate) const {
  if (refs_.empty()) return 0.0;
  Orders cand = Weigh(NGramStats::From(candidate.counted()), *idf_);
  double total = 0.0;
  for (int k = 0; k < kMaxNGramOrder; ++k) {
    const Vec& c = cand[k];
    double order_sum = 0.0;
    for (const Orders& ref_orders : refs_) {
      const Vec& r = ref_orders[k];
      if (c.norm == 0.0 || r.norm == 0.0) continue;
      // Merge over the two sorted entry lists.
      double dot = 0.0;
      auto ci = c.entries.begin();
      auto ri = r.entries.begin();
      while (ci != c.entries.end() && ri != r.entries.end()) {
        if (ci->first < ri->first) {
          ++ci;
        } else if (ri->first < ci->first) {
          ++ri;
        } else {
          dot += std::min(ci->second, ri->second) * ri->second;
          ++ci;
          ++ri;
        }
      }
      order_sum += dot / (c.norm * r.norm);
    }
    total += order_sum / static_cast<double>(refs_.size());
  }
  return 10.0 * total / kMaxNGramOrder;
}

double Cider(const TokenSequence& candidate,
             std::span<const TokenSequence> refs, const CorpusIdf& idf) {
  return CiderReferences(refs, idf).Score(candidate);
}

namespace {

struct ClippedCounts {
  std::vector<double> clipped;
  std::vector<double> total;
  double candidate_length = 0.0;
  double reference_length = 0.0;
};

ClippedCounts CountClipped(const TokenSequence& candidate,
                           std::span<const TokenSequence> refs,
                           int max_order) {
  ClippedCounts out;
  out.clipped.assign(max_order, 0.0);
  out.total.assign(max_order, 0.0);
  std::span<const Token> cand = candidate.counted();
  const int len = static_cast<int>(cand.size());
  out.candidate_length = len;

  // Closest reference length, ties broken toward the shorter reference.
  int best = -1;
  for (const auto& r : refs) {
    int rl = static_cast<int>(r.counted().size());
    if (best < 0 || std::abs(rl - len) < std::abs(best - len) ||
        (std::abs(rl - len) == std::abs(best - len) && rl < best))
      best = rl;
  }
  out.reference_length = std::max(best, 0);

  for (int k = 1; k <= max_order; ++k) {
    std::map<NGramKey, int> max_ref;
    for (const auto& r : refs) {
      std::span<const Token> toks = r.counted();
      std::map<NGramKey, int> counts;
      for (int i = 0; i + k <= static_cast<int>(toks.size()); ++i)
        ++counts[PackNGram(toks.subspan(i, k))];
      for (const auto& [key, c] : counts) max_ref[key] = std::max(max_ref[key], c);
    }
    std::map<NGramKey, int> cand_counts;
    for (int i = 0; i + k <= len; ++i) ++cand_counts[PackNGram(cand.subspan(i, k))];
    double clipped = 0.0;
    for (const auto& [key, c] : cand_counts) {
      auto it = max_ref.find(key);
      if (it != max_ref.end()) clipped += std::min(c, it->second);
    }
    out.clipped[k - 1] = clipped;
    out.total[k - 1] = std::max(len - k + 1, 0);
  }
  return out;
}

std::vector<double> CombineBleu(const std::vector<double>& clipped,
                                const std::vector<double>& total,
                                double candidate_length,
                                double reference_length) {
  const int max_order = static_cast<int>(clipped.size());
  std::vector<double> scores(max_order, 0.0);
  if (candidate_length <= 0.0) return scores;
  double bp = candidate_length >= reference_length
                  ? 1.0
                  : std::exp(1.0 - reference_length / candidate_length);
  double log_sum = 0.0;
  for (int k = 0; k < max_order; ++k) {
    if (total[k] <= 0.0 || clipped[k] <= 0.0) break;  // all higher orders stay 0
    log_sum += std::log(clipped[k] / total[k]);
    scores[k] = bp * std::exp(log_sum / (k + 1));
  }
  return scores;
}

}  // namespace

std::vector<double> Bleu(const TokenSequence& candidate,
                         std::span<const TokenSequence> refs, int max_order) {
  ClippedCounts c = CountClipped(candidate, refs, max_order);
  return CombineBleu(c.clipped, c.total, c.candidate_length, c.reference_length);
}

BleuAccumulator::BleuAccumulator(int max_order)
    : max_order_(max_order), clipped_(max_order, 0.0), total_(max_order, 0.0) {}

void BleuAccumulator::Add(const TokenSequence& candidate,
                          std::span<const TokenSequence> refs) {
  ClippedCounts c = CountClipped(candidate, refs, max_order_);
  for (int k = 0; k < max_order_; ++k) {
    clipped_[k] += c.clipped[k];
    total_[k] += c.total[k];
  }
  candidate_length_ += c.candidate_length;
  reference_length_ += c.reference_length;
}

std::vector<double> BleuAccumulator::Scores() const {
  return CombineBleu(clipped_, total_, candidate_length_, reference_length_);
}

std::vector<TokenSequence> WithEosReferences(
    std::span<const std::vector<Token>> references) {
  std::vector<TokenSequence> out;
  out.reserve(references.size());
  for (const auto& r : references) {
    std::vector<Token> t = r;
    if (t.empty() || t.back() != kEos) t.push_back(kEos);
    out.emplace_back(std::move(t), true);
  }
  return out;
}

namespace {

std::vector<TokenSequence> PlainReferences(
    std::span<const std::vector<Token>> references) {
  std::vector<TokenSequence> out;
  out.reserve(references.size());
  for (const auto& r : references) out.emplace_back(r, false);
  return out;
}

}  // namespace

CiderReward::CiderReward(std::span<const std::vector<Token>> references,
                         const CorpusIdf& idf)
    : plain_(PlainReferences(references), idf),
      with_eos_(WithEosReferences(references), idf) {}

double CiderReward::operator()(std::span<const Token> tokens,
                               bool with_eos) const {
  // A truncated sequence has no EOS to include; it is scored as it stands.
  const bool eos = with_eos && !tokens.empty() && tokens.back() == kEos;
  TokenSequence cand(std::vector<Token>(tokens.begin(), tokens.end()), eos);
  return eos ? with_eos_.Score(cand) : plain_.Score(cand);
}

double Reward(std::span<const Token> tokens,
              std::span<const std::vector<Token>> references,
              const CorpusIdf& idf, bool with_eos) {
  return CiderReward(references, idf)(tokens, with_eos);
}

}  // namespace seqcritic
