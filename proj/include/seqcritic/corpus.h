// seqcritic/corpus.h

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

#ifndef SEQCRITIC_CORPUS_H_
#define SEQCRITIC_CORPUS_H_

// Captioning datasets: a vocabulary, one fixed context vector per example
// standing in for the image feature, and 1..R tokenized references.
//
// References are stored without BOS or EOS; the training code appends EOS
// exactly once when it builds a target sequence.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "seqcritic/metrics.h"
#include "seqcritic/token.h"

namespace seqcritic {

class Vocabulary {
 public:
  Vocabulary();  // just the reserved <bos> <eos> <unk>

  // Returns the id of `word`, adding it if new.
  Token Add(std::string_view word);
  // Unknown words map to kUnk.
  Token Lookup(std::string_view word) const;
  bool Contains(std::string_view word) const;
  const std::string& Word(Token id) const;
  int size() const { return static_cast<int>(words_.size()); }

  std::vector<Token> Encode(std::span<const std::string> words) const;
  std::vector<std::string> Decode(std::span<const Token> tokens) const;
  std::string DecodeText(std::span<const Token> tokens) const;

  // One word per line, in id order.
  void Save(const std::filesystem::path& path) const;
  static Vocabulary Load(const std::filesystem::path& path);

  bool operator==(const Vocabulary& other) const { return words_ == other.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, Token> ids_;
};

enum class Split { kTrain, kVal, kTest };

const char* SplitName(Split split);
Split ParseSplit(std::string_view name);

struct Example {
  std::string id;
  Split split = Split::kTrain;
  std::vector<double> context;
  std::vector<std::vector<Token>> references;
};

struct SplitSpec {
  std::vector<std::size_t> train;
  std::vector<std::size_t> val;
  std::vector<std::size_t> test;

  const std::vector<std::size_t>& Get(Split split) const;
};

struct Dataset {
  Vocabulary vocab;
  std::vector<Example> examples;
  int context_dim = 0;
  int max_len = 16;

  // Example indices per split, in file order.
  SplitSpec Splits() const;
  std::vector<const Example*> Select(Split split) const;
};

struct SyntheticConfig {
  int num_examples = 2000;
  int num_attributes = 4;  // 3..5
  int refs_per_example = 5;
  int context_dim = 32;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
  std::uint64_t seed = 7;
};

// Each example draws one value per attribute slot (object, color, place,
// action, size; the first `num_attributes` slots). The context is the
// concatenated one-hot encoding of those values, zero padded to
// context_dim. Each reference realizes every attribute through one of a few
// sentence templates, picking among each value's synonyms.
Dataset GenerateSynthetic(const SyntheticConfig& config);

// Words a synthetic reference may contain given its attribute values:
// template function words plus every surface form of those values.
struct SyntheticLexicon {
  std::vector<std::string> function_words;
  // slot -> value -> surface forms
  std::vector<std::vector<std::vector<std::string>>> surface_forms;
  std::vector<std::string> slot_names;
};
const SyntheticLexicon& GetSyntheticLexicon();
// Attribute values of a synthetic example, decoded from its context.
std::vector<int> DecodeSyntheticAttributes(const Example& example,
                                           int num_attributes);

struct CocoLoadOptions {
  int min_word_count = 5;
  int max_len = 16;
  int context_dim = 32;
  double val_fraction = 0.1;
  double test_fraction = 0.1;
};

// COCO-caption style JSON:
//   {"images": [{"id": <int|string>, "split"?: "train|val|test",
//                "feature"?: [numbers]}],
//    "annotations": [{"image_id": <id>, "caption": "<text>"}]}
// Captions are lower-cased, split on whitespace, truncated to max_len words;
// words seen fewer than min_word_count times become <unk>.
Dataset LoadCocoJson(const std::filesystem::path& path,
                     const CocoLoadOptions& options);
Dataset ParseCocoJson(std::string_view text, const CocoLoadOptions& options);

std::vector<std::string> TokenizeCaption(std::string_view caption, int max_len);

// JSON-lines dataset: one example per line,
//   {"id":..., "split":..., "context":[...], "references":[["a","dog"],...]}
// plus a vocabulary file alongside.
void SaveJsonLines(const Dataset& dataset, const std::filesystem::path& path,
                   const std::filesystem::path& vocab_path);
Dataset LoadJsonLines(const std::filesystem::path& path,
                      const std::filesystem::path& vocab_path);

// Idf table for the reward: every train reference contributes both its
// plain n-grams and its EOS-terminated n-grams.
CorpusIdf FitRewardIdf(const Dataset& dataset, Split split = Split::kTrain);

}  // namespace seqcritic

#endif  // SEQCRITIC_CORPUS_H_
